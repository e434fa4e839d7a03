#pragma once

#include <optional>
#include <string>

#include "tlsloss/response/resonator.hpp"
#include "tlsloss/response/sweep.hpp"

namespace tlsloss::response {

// Complex baseline (a0 + a1 x) exp(i (theta0 + theta1 x)), x = (f - centre) / half_span.
struct Baseline {
  double centre = 0.0;
  double half_span = 1.0;
  double a0 = 1.0, a1 = 0.0;
  double theta0 = 0.0, theta1 = 0.0;
  bool refined = false;  // true when fitted jointly with the resonance

  std::complex<double> operator()(double f) const;
};

struct NormalizeOptions {
  double edge_fraction = 0.10;  // of the points, on each side
  bool joint_refinement = true; // refit baseline together with the dip when one is present
};

// Estimate the off-resonance baseline: first a linear amplitude and phase fit
// to the outer edge windows, then (if a dip is detected) a joint fit of the
// baseline and the notch model. Throws DegenerateError when the edge windows
// hold fewer than three points each.
Baseline estimate_baseline(const FrequencySweep& sweep, const NormalizeOptions& opts = {});

// Divide the estimated baseline out of the sweep; metadata is preserved.
FrequencySweep normalize_sweep(const FrequencySweep& sweep, const NormalizeOptions& opts = {});

struct S21Fit {
  ResonatorParams params;   // including 1-sigma uncertainties
  bool converged = false;
  int iterations = 0;
  double residual_rms = 0.0;   // per quadrature
  double noise_estimate = 0.0; // from edge-window point-to-point scatter
  std::string message;
};

// Edge-window noise estimate per quadrature (successive differences / sqrt 2).
double estimate_noise(const FrequencySweep& sweep, double edge_fraction = 0.10);

// Dip-based starting point: f0 at min |S21|^2, Q from the full width at half
// depth of 1 - |S21|^2, |Qe^-1| from the depth, phi = 0.
ResonatorParams initial_guess(const FrequencySweep& sweep);

// Least-squares fit of the notch model to a normalized sweep. Throws
// NotFoundError when the dip is shallower than 5x the noise and
// ConvergenceError when the fitter gives up.
S21Fit fit_s21(const FrequencySweep& sweep, const std::optional<ResonatorParams>& init = std::nullopt);

}  // namespace tlsloss::response
