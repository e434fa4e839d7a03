#include "tlsloss/response/sweep.hpp"

#include <cmath>
#include <random>

#include "tlsloss/error.hpp"

namespace tlsloss::response {

void FrequencySweep::validate() const {
  if (freqs.size() != s21.size()) throw SchemaError("s21", "length differs from freq_hz");
  if (freqs.size() < 2) throw SchemaError("freq_hz", "need at least two points");
  const bool increasing = freqs[1] > freqs[0];
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (!std::isfinite(freqs[i]) || freqs[i] <= 0.0)
      throw SchemaError("freq_hz", "row " + std::to_string(i) + " is not a positive finite number");
    if (i > 0 && (increasing ? freqs[i] <= freqs[i - 1] : freqs[i] >= freqs[i - 1]))
      throw SchemaError("freq_hz", "not strictly monotone at row " + std::to_string(i));
    if (!std::isfinite(s21[i].real()) || !std::isfinite(s21[i].imag()))
      throw SchemaError("s21", "row " + std::to_string(i) + " is not finite");
  }
  if (!(drive_power_incident >= 0.0)) throw SchemaError("p_inc_watt", "must be >= 0");
  if (!std::isfinite(drive_detuning)) throw SchemaError("detuning_hz", "must be finite");
  if (!(base_temp > 0.0)) throw SchemaError("t_bp_kelvin", "must be > 0");
}

std::vector<double> default_grid(const ResonatorParams& p, double linewidths, int points) {
  p.validate();
  if (points < 2 || !(linewidths > 0.0)) throw DomainError("default_grid: need >= 2 points and a positive span");
  const double span = linewidths * p.f0 * p.q_total_inv;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = p.f0 + span * (static_cast<double>(i) / (points - 1) - 0.5);
  return grid;
}

FrequencySweep synth_sweep(const ResonatorParams& p, const std::vector<double>& grid,
                           const NoiseSpec& noise, const SweepMeta& meta) {
  p.validate();
  if (noise.sigma_iq < 0.0) throw DomainError("synth_sweep: sigma_iq must be >= 0");
  FrequencySweep sweep;
  sweep.freqs = grid;
  sweep.s21.reserve(grid.size());
  sweep.drive_power_incident = meta.drive_power_incident;
  sweep.drive_detuning = meta.drive_detuning;
  sweep.base_temp = meta.base_temp;
  sweep.device_id = meta.device_id;
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double f : grid) {
    std::complex<double> s = s21_model(f, p);
    if (noise.sigma_iq > 0.0) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      s += noise.sigma_iq * std::complex<double>(re, im);
    }
    sweep.s21.push_back(s);
  }
  sweep.validate();
  return sweep;
}

}  // namespace tlsloss::response
