#include "tlsloss/ftir/spectrum.hpp"

#include <cmath>
#include <random>

#include "tlsloss/error.hpp"

namespace tlsloss::ftir {

void IrSpectrum::validate() const {
  if (wavenumber.size() != absorbance.size()) throw SchemaError("absorbance", "length differs from wavenumber_cm1");
  if (wavenumber.size() < 2) throw SchemaError("wavenumber_cm1", "need at least two points");
  if (!(thickness_cm > 0.0) || !std::isfinite(thickness_cm)) throw SchemaError("thickness_cm", "must be finite and > 0");
  const bool increasing = wavenumber[1] > wavenumber[0];
  for (std::size_t i = 0; i < wavenumber.size(); ++i) {
    const double w = wavenumber[i];
    const std::string row = " (row " + std::to_string(i) + ")";
    if (!std::isfinite(w) || w < 400.0 || w > 7000.0)
      throw SchemaError("wavenumber_cm1", "outside [400, 7000] cm^-1" + row);
    if (i > 0 && (increasing ? w <= wavenumber[i - 1] : w >= wavenumber[i - 1]))
      throw SchemaError("wavenumber_cm1", "not strictly monotone" + row);
    if (!std::isfinite(absorbance[i])) throw SchemaError("absorbance", "not finite" + row);
  }
}

double gaussian(double x, const GaussianLine& g) {
  const double z = (x - g.center) / g.sigma;
  return g.amplitude * std::exp(-0.5 * z * z);
}

IrSpectrum synth_spectrum(const SpectrumSpec& spec) {
  if (spec.noise_sigma < 0.0) throw DomainError("synth_spectrum: noise_sigma must be >= 0");
  for (const auto& l : spec.lines)
    if (!(l.sigma > 0.0)) throw DomainError("synth_spectrum: line width must be > 0");
  IrSpectrum s;
  s.wavenumber = spec.grid;
  s.thickness_cm = spec.thickness_cm;
  s.label = spec.label;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double x : spec.grid) {
    double a = 0.0;
    for (const auto& l : spec.lines) a += gaussian(x, l);
    const double u = (x - 4000.0) / 1000.0;
    double p = 1.0;
    for (double c : spec.baseline) {
      a += c * p;
      p *= u;
    }
    if (spec.noise_sigma > 0.0) a += spec.noise_sigma * gauss(rng);
    s.absorbance.push_back(a);
  }
  s.validate();
  return s;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi > lo)) throw DomainError("uniform_grid: need lo < hi and step > 0");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
  return g;
}

}  // namespace tlsloss::ftir
