#include "tlsloss/tlsmodel/shift.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "tlsloss/constants.hpp"
#include "tlsloss/error.hpp"
#include "tlsloss/numerics/special.hpp"
#include "tlsloss/tlsmodel/relaxation.hpp"

namespace tlsloss::tlsmodel {

using constants::boltzmann;
using constants::hbar;
using std::numbers::pi;

double resonant_shift_bracket(double t, double f0) {
  if (!(t > 0.0)) throw DomainError("dfrac_res: temperature must be > 0");
  if (!(f0 > 0.0)) throw DomainError("dfrac_res: f0 must be > 0");
  const double y = hbar * 2.0 * pi * f0 / (2.0 * pi * boltzmann * t);
  // 1/2 + y/i = 1/2 - i y; for very large y the asymptotic difference is
  // -1/(24 y^2) and the subtraction below would only return rounding noise.
  if (y > 1e7) return -1.0 / (24.0 * y * y);
  return numerics::digamma(std::complex<double>(0.5, -y)).real() - std::log(y);
}

double dfrac_res(double t, double f0, const TlsParams& p) {
  const double scale = p.shift_res_scale.value_or(p.f_tan_res / pi);
  return scale * resonant_shift_bracket(t, f0);
}

double dfrac_tls(double t, double f0, const TlsParams& p, const RelaxKernelParams& k) {
  const double rel_scale = p.shift_rel_scale.value_or(relaxation_scale(p, f0, k));
  return dfrac_res(t, f0, p) + dfrac_rel(t, f0, rel_scale, k);
}

}  // namespace tlsloss::tlsmodel
