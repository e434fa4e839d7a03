#pragma once

#include <cstdint>
#include <vector>

#include "tlsloss/inference/loss_fit.hpp"
#include "tlsloss/tlsmodel/device_model.hpp"

namespace tlsloss::inference {

// Gaussian measurement noise on Qi^-1: sigma = hypot(relative * q, absolute).
struct LossNoise {
  double relative = 0.01;
  double absolute = 0.0;
  std::uint64_t seed = 0;
};

// Power sweep at fixed base temperature: one point per (device, n) in that
// order, self-heating applied when the film has it. Noise is drawn from one
// generator seeded with noise.seed, in point order.
LossDataset synth_power_sweep(const tlsmodel::FilmParams& film, const std::vector<tlsmodel::Device>& devices,
                              const std::vector<double>& n_grid, double t_bp, const LossNoise& noise,
                              RelaxationCache& cache);

// Temperature sweep at fixed photon number.
LossDataset synth_temperature_sweep(const tlsmodel::FilmParams& film,
                                    const std::vector<tlsmodel::Device>& devices,
                                    const std::vector<double>& t_grid, double n_bar, const LossNoise& noise,
                                    RelaxationCache& cache);

// n log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

}  // namespace tlsloss::inference
