#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tlsloss/inference/loss_fit.hpp"
#include "tlsloss/numerics/least_squares.hpp"
#include "tlsloss/tlsmodel/device_model.hpp"

namespace tlsloss::inference {

// Temperature-dependent loss curve of one device: the fitted film evaluated
// without self-heating, q(n, T).
class TemperatureModel {
public:
  TemperatureModel(const tlsmodel::FilmParams& film, const tlsmodel::Device& dev, RelaxationCache& cache);
  double operator()(double n, double t) const;
  const tlsmodel::Device& device() const { return dev_; }

private:
  tlsmodel::FilmParams film_;
  tlsmodel::Device dev_;
  RelaxationCache* cache_;
};

struct ThermometryOptions {
  double t_hi = 4.0;             // K, upper end of the inversion bracket
  double detection_sigmas = 3.0; // excess loss below this many sigma => at base
  double t_tol = 1e-10;          // K, root tolerance
};

struct TEffEstimate {
  double t_eff = 0.0;    // K
  double sigma_t = 0.0;  // K, from sigma_q / |dq/dT|
  bool at_base = false;  // no detectable excess loss over q(n, T_bp)
};

// Temperature at which the model reproduces q_measured at photon number n.
// Returns T_bp when q_measured <= q(n, T_bp) (or lies within
// detection_sigmas * sigma_q of it); otherwise searches [max(T_bp, T_min), t_hi]
// where T_min minimizes q(n, .) on the bracket. Throws OutOfRangeError, with
// the attainable q range, when q_measured exceeds q(n, t_hi).
TEffEstimate infer_effective_temperature(double q_measured, double n, const TemperatureModel& model,
                                         double t_bp, double sigma_q = 0.0,
                                         const ThermometryOptions& opts = {});

struct SelfHeatingPoint {
  double n_bar = 0.0;
  double t_eff = 0.0;    // K
  double sigma_t = 0.0;  // K
  double t_bp = 0.01;    // K
  std::string device_id;
  bool at_base = false;
  bool out_of_range = false;
  std::string message;
};

struct SelfHeatingCurve {
  std::vector<SelfHeatingPoint> points;
  std::optional<tlsmodel::SelfHeatingLaw> fitted_law;
};

enum class ThermometryMode { shared, per_device };

// Invert every point of a power sweep. In shared mode `film` is used for all
// devices (scaled by each point's f_sin); in per-device mode `per_device`
// must hold a film for every device id. Out-of-range points are flagged, not fatal.
SelfHeatingCurve infer_curve(const LossDataset& power, const tlsmodel::FilmParams& film,
                             RelaxationCache& cache, ThermometryMode mode = ThermometryMode::shared,
                             const std::map<std::string, tlsmodel::FilmParams>& per_device = {},
                             const ThermometryOptions& opts = {});

struct SelfHeatingOptions {
  bool free_beta = false;
  double beta = 0.5;             // start value, and the frozen value
  double min_decades = 2.0;      // n_bar span below this => low confidence
  bool include_at_base = false;  // use points with no detectable heating
};

struct SelfHeatingFit {
  tlsmodel::SelfHeatingLaw law;  // t_bp: median of the fitted points
  double sigma_a = 0.0;
  double sigma_beta = 0.0;
  bool low_confidence = false;
  int points_used = 0;
  std::map<std::string, double> per_device_a;  // diagnostic, beta fixed at the joint value
  numerics::FitResult fit;
  std::string message;
};

// Joint fit of T_eff = T_bp + A n^beta over all devices, weighted by sigma_T.
// With no usable points (no detectable heating) returns A = 0 with
// low_confidence set.
SelfHeatingFit fit_self_heating(const std::vector<SelfHeatingCurve>& curves,
                                const SelfHeatingOptions& opts = {});

}  // namespace tlsloss::inference
