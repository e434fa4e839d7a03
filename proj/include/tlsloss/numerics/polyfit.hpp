#pragma once

#include <span>
#include <vector>

namespace tlsloss::numerics {

// Least-squares polynomial. Internally the abscissa is centred and scaled
// to [-1, 1] so that degree-3 fits over IR wavenumbers stay well conditioned.
class Polynomial {
public:
  Polynomial() = default;
  Polynomial(double origin, double scale, std::vector<double> scaled_coefficients);

  double operator()(double x) const;
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  // Coefficients c_k of x^k in the raw variable (expanded from the scaled form).
  std::vector<double> coefficients() const;

private:
  double origin_ = 0.0;
  double scale_ = 1.0;
  std::vector<double> coeffs_;
};

// Throws DegenerateError when fewer than degree+1 distinct abscissae exist
// or the design matrix is rank deficient.
Polynomial polyfit(std::span<const double> x, std::span<const double> y, int degree);

}  // namespace tlsloss::numerics
