#pragma once

#include <functional>

namespace tlsloss::numerics {

struct RootOptions {
  double x_tol = 1e-12;   // absolute interval width at which to stop
  double f_tol = 0.0;     // stop once |f(x)| <= f_tol
  int max_iterations = 200;
};

// Brent's method on [a, b]. Requires f(a) * f(b) <= 0, else BracketError.
// Deterministic: the same bracket always yields the same iterate sequence.
double find_root(const std::function<double(double)>& f, double a, double b,
                 const RootOptions& options = {});

// Golden-section minimisation of a unimodal function on [a, b].
double minimize_scalar(const std::function<double(double)>& f, double a, double b,
                       double x_tol = 1e-10);

}  // namespace tlsloss::numerics
