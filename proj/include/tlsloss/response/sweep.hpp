#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "tlsloss/response/resonator.hpp"

namespace tlsloss::response {

struct FrequencySweep {
  std::vector<double> freqs;               // Hz, strictly monotone
  std::vector<std::complex<double>> s21;   // same length
  double drive_power_incident = 0.0;       // W
  double drive_detuning = 1.5e6;           // Hz
  double base_temp = 0.01;                 // K
  std::string device_id;

  std::size_t size() const { return freqs.size(); }
  // Throws SchemaError naming the offending field.
  void validate() const;
};

struct NoiseSpec {
  double sigma_iq = 0.0;  // std of the additive Gaussian noise on each quadrature
  std::uint64_t seed = 0;
};

struct SweepMeta {
  double drive_power_incident = 0.0;
  double drive_detuning = 1.5e6;
  double base_temp = 0.01;
  std::string device_id;
};

// Uniform grid of `points` frequencies spanning `linewidths` full linewidths
// (f0 / Q) centred on f0.
std::vector<double> default_grid(const ResonatorParams& p, double linewidths = 20.0, int points = 401);

// The notch model on `grid` plus i.i.d. Gaussian noise on re and im, drawn
// from a generator seeded with noise.seed (bit-reproducible for a fixed seed).
FrequencySweep synth_sweep(const ResonatorParams& p, const std::vector<double>& grid,
                           const NoiseSpec& noise = {}, const SweepMeta& meta = {});

}  // namespace tlsloss::response
