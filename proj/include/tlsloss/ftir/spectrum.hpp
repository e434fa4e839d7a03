#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tlsloss::ftir {

struct IrSpectrum {
  std::vector<double> wavenumber;  // cm^-1, strictly monotone, within [400, 7000]
  std::vector<double> absorbance;  // decadic absorbance
  double thickness_cm = 0.0;       // film thickness
  std::string label;               // as-deposited | annealed | other

  std::size_t size() const { return wavenumber.size(); }
  // Throws SchemaError naming the offending field.
  void validate() const;
};

// Gaussian absorption line a exp(-(x - c)^2 / (2 s^2)).
struct GaussianLine {
  double center = 0.0;     // cm^-1
  double sigma = 0.0;      // cm^-1
  double amplitude = 0.0;  // absorbance
};

double gaussian(double x, const GaussianLine& g);

struct SpectrumSpec {
  std::vector<double> grid;              // cm^-1
  std::vector<GaussianLine> lines;
  std::vector<double> baseline;          // polynomial coefficients in (x - 4000) / 1000, low order first
  double noise_sigma = 0.0;              // absorbance
  std::uint64_t seed = 0;
  double thickness_cm = 1e-4;
  std::string label = "other";
};

// Lines plus baseline plus i.i.d. Gaussian noise (bit-reproducible per seed).
IrSpectrum synth_spectrum(const SpectrumSpec& spec);

// Uniform grid from lo to hi with the given spacing (cm^-1).
std::vector<double> uniform_grid(double lo, double hi, double step);

}  // namespace tlsloss::ftir
