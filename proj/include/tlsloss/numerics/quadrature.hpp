#pragma once

#include <cstddef>
#include <functional>
#include <limits>

namespace tlsloss::numerics {

// Where an integrable square-root singularity sits, if anywhere.
enum class Singularity {
  none,
  lower_sqrt,  // f ~ sqrt(x - a) or 1/sqrt(x - a) near the lower limit
  upper_sqrt,  // same at a finite upper limit
};

struct QuadratureSpec {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();  // +inf allowed
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  Singularity singularity = Singularity::none;
  std::size_t max_subdivisions = 2000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t subdivisions = 0;
};

using Integrand = std::function<double(double)>;

// Globally adaptive 15-point Gauss-Kronrod quadrature.
//
// A semi-infinite domain [a, inf) is mapped with x = a + t/(1-t). A lower
// square-root singularity on [a, inf) with a > 0 uses x = a/(1 - u^2), which
// turns sqrt(1 - a/x) into u; on finite domains x = a + u^2 (or b - u^2) is
// used. The rule never samples the endpoints themselves.
//
// Throws QuadratureError when the tolerance max(abs_tol, rel_tol*|I|) is not
// met within max_subdivisions, or when the integrand returns a non-finite
// value (the offending abscissa is reported in the original variable).
QuadratureResult integrate(const Integrand& f, const QuadratureSpec& spec);

// Plain finite-interval adaptive Gauss-Kronrod, no transformations.
QuadratureResult integrate_finite(const Integrand& f, double a, double b, double rel_tol,
                                  double abs_tol = 0.0, std::size_t max_subdivisions = 2000);

}  // namespace tlsloss::numerics
