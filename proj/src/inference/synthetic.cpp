#include "tlsloss/inference/synthetic.hpp"

#include <cmath>
#include <random>

#include "tlsloss/error.hpp"

namespace tlsloss::inference {

namespace {

struct Sample {
  double n, t;
};

LossDataset synth(const tlsmodel::FilmParams& film, const std::vector<tlsmodel::Device>& devices,
                  const std::vector<Sample>& samples, const LossNoise& noise, RelaxationCache& cache,
                  SweepKind kind) {
  if (noise.relative < 0.0 || noise.absolute < 0.0) throw DomainError("synthetic sweep: noise must be >= 0");
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  LossDataset ds;
  ds.kind = kind;
  for (const auto& dev : devices) {
    for (const auto& s : samples) {
      LossPoint pt;
      pt.n_bar = s.n;
      pt.t_bp = s.t;
      pt.device_id = dev.id;
      pt.f_sin = dev.f_sin;
      pt.f0 = dev.f0;
      const double q = model_point(pt, film, cache, true);
      if (!std::isfinite(q)) throw OutOfRangeError("synthetic sweep: model undefined at this operating point", s.n, s.t);
      pt.sigma = std::hypot(noise.relative * q, noise.absolute);
      if (!(pt.sigma > 0.0)) pt.sigma = 1e-3 * std::abs(q) + 1e-12;  // noiseless: nominal weight
      const double z = gauss(rng);
      pt.q_int_inv = noise.relative > 0.0 || noise.absolute > 0.0 ? q + pt.sigma * z : q;
      ds.points.push_back(pt);
    }
  }
  ds.validate();
  return ds;
}

}  // namespace

LossDataset synth_power_sweep(const tlsmodel::FilmParams& film, const std::vector<tlsmodel::Device>& devices,
                              const std::vector<double>& n_grid, double t_bp, const LossNoise& noise,
                              RelaxationCache& cache) {
  std::vector<Sample> s;
  for (double n : n_grid) s.push_back({n, t_bp});
  return synth(film, devices, s, noise, cache, SweepKind::power);
}

LossDataset synth_temperature_sweep(const tlsmodel::FilmParams& film,
                                    const std::vector<tlsmodel::Device>& devices,
                                    const std::vector<double>& t_grid, double n_bar, const LossNoise& noise,
                                    RelaxationCache& cache) {
  std::vector<Sample> s;
  for (double t : t_grid) s.push_back({n_bar, t});
  return synth(film, devices, s, noise, cache, SweepKind::temperature);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw DomainError("log_grid: need 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  if (n > 1) g.back() = hi;
  return g;
}

}  // namespace tlsloss::inference
