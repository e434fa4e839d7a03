#pragma once

#include <complex>

namespace tlsloss::numerics {

// Complex digamma. Arguments with Re(z) < 1/2 are reflected, then the
// recurrence shifts Re(z) above 10 before the 8-term asymptotic series.
// Throws DomainError at the poles z = 0, -1, -2, ...
std::complex<double> digamma(std::complex<double> z);
double digamma(double x);

// Modified Bessel function of the second kind, order zero. Power series for
// x <= 2, Steed's continued fraction above. Underflows to 0 past x ~ 745.
// Throws DomainError for x <= 0.
double bessel_k0(double x);

// coth(x) that stays finite-precision for |x| < 1e-8 (series 1/x + x/3).
double coth(double x);

// sech^2(x) without overflow for large |x|.
double sech2(double x);

}  // namespace tlsloss::numerics
