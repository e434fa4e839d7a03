#include "tlsloss/tlsmodel/relaxation.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "tlsloss/constants.hpp"
#include "tlsloss/error.hpp"
#include "tlsloss/numerics/quadrature.hpp"
#include "tlsloss/numerics/special.hpp"
#include "tlsloss/tlsmodel/loss.hpp"

namespace tlsloss::tlsmodel {

using constants::boltzmann;
using std::numbers::pi;

namespace {

constexpr double kInnerTol = 1e-11;
constexpr double kOuterTol = 1e-10;

// Below this c the Lorentzian peak at u = 1 is too narrow for quadrature and
// the closed form is used instead.
constexpr double kClosedFormMaxC = 1e-2;

// With z = sqrt(1 - i c) the inner integrands are Im (loss) and Re (shift) of
// 2u^2 / (z^2 - u^2), whose integral over [0, 1] is z ln((z+1)/(z-1)) - 2.
// z - 1 is formed as -i c / (z + 1) to avoid cancellation.
std::complex<double> inner_closed_form(double c) {
  const std::complex<double> z = std::sqrt(std::complex<double>(1.0, -c));
  const std::complex<double> z_minus_1 = std::complex<double>(0.0, -c) / (z + 1.0);
  return z * std::log((z + 1.0) / z_minus_1) - 2.0;
}

void require_temperature(double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << who << ": temperature must be > 0 (got " << t << " K)";
    throw DomainError(msg.str());
  }
}

// scale-free outer integral int_0^xi_max sech^2(xi) inner(c(xi)) dxi
double outer_integral(double t, double f0, const RelaxKernelParams& k, double (*inner)(double),
                      const char* who) {
  require_temperature(t, who);
  if (!(f0 > 0.0)) throw DomainError(std::string(who) + ": f0 must be > 0");
  k.validate();
  const double xi_max = relaxation_xi_max();
  auto integrand = [&](double xi) {
    const double s2 = numerics::sech2(xi);
    if (s2 == 0.0) return 0.0;
    return s2 * inner(omega_tau_min(xi, t, f0, k));
  };
  // w0 tau_min falls monotonically with xi; the inner integral crosses over
  // where it passes 1, which can sit at tiny xi for strong coupling, so that
  // point gets its own segment boundary.
  double xi_c = 0.0;
  if (omega_tau_min(xi_max, t, f0, k) < 1.0 && omega_tau_min(1e-300, t, f0, k) > 1.0) {
    double lo = std::log(1e-300), hi = std::log(xi_max);
    for (int i = 0; i < 200 && hi - lo > 1e-6; ++i) {
      const double mid = 0.5 * (lo + hi);
      (omega_tau_min(std::exp(mid), t, f0, k) > 1.0 ? lo : hi) = mid;
    }
    xi_c = std::exp(hi);
  }
  try {
    if (xi_c <= 0.0) return numerics::integrate_finite(integrand, 0.0, xi_max, kOuterTol).value;
    return numerics::integrate_finite(integrand, 0.0, xi_c, kOuterTol).value +
           numerics::integrate_finite(integrand, xi_c, xi_max, kOuterTol).value;
  } catch (const QuadratureError& e) {
    std::ostringstream msg;
    msg << who << " at T = " << t << " K over E/2kT in (0, " << xi_max << "]: " << e.what();
    throw QuadratureError(msg.str(), e.best_estimate, e.error_estimate, e.abscissa);
  }
}

}  // namespace

double relaxation_inner_loss(double c) {
  if (!(c >= 0.0)) throw DomainError("relaxation_inner_loss: c must be >= 0");
  if (c > 1e6) return 2.0 / (3.0 * c) - 16.0 / (105.0 * c * c * c);
  if (c == 0.0) return 0.5 * pi;
  if (c < kClosedFormMaxC) return inner_closed_form(c).imag();
  auto g = [c](double u) {
    const double w = (1.0 - u) * (1.0 + u);
    return 2.0 * c * u * u / (w * w + c * c);
  };
  return numerics::integrate_finite(g, 0.0, 1.0, kInnerTol).value;
}

double relaxation_inner_shift(double c) {
  if (!(c > 0.0)) throw DomainError("relaxation_inner_shift: c must be > 0");
  if (c > 1e6) {
    const double c2 = c * c;
    return 4.0 / (15.0 * c2) - 32.0 / (315.0 * c2 * c2);
  }
  if (c < kClosedFormMaxC) return inner_closed_form(c).real();
  auto g = [c](double u) {
    const double w = (1.0 - u) * (1.0 + u);
    return 2.0 * u * u * w / (w * w + c * c);
  };
  return numerics::integrate_finite(g, 0.0, 1.0, kInnerTol).value;
}

double omega_tau_min(double xi, double t, double f0, const RelaxKernelParams& k) {
  const double two_kt = 2.0 * boltzmann * t;
  // xi^d coth(xi) = xi^(d-1) * (xi coth xi), finite as xi -> 0
  const double xi_coth = xi < 1e-8 ? 1.0 + xi * xi / 3.0 : xi / std::tanh(xi);
  const double rate = relaxation_rate_constant(k) * std::pow(two_kt, k.d) *
                      std::pow(xi, k.d - 1) * xi_coth;
  return 2.0 * pi * f0 / rate;
}

double relaxation_xi_max() {
  static const double value = std::acosh(1e8);  // sech^2 = 1e-16
  return value;
}

double q_rel_inv_full(double t, double f0, double scale, const RelaxKernelParams& k) {
  if (scale < 0.0) throw DomainError("q_rel_inv_full: scale must be >= 0");
  if (scale == 0.0) return 0.0;
  return scale / 3.0 * outer_integral(t, f0, k, relaxation_inner_loss, "q_rel_inv_full");
}

double q_rel_inv_slow_limit(double t, double f0, double scale, const RelaxKernelParams& k) {
  require_temperature(t, "q_rel_inv_slow_limit");
  const double omega = 2.0 * pi * f0;
  return 2.0 * scale / (9.0 * omega) * relaxation_rate_constant(k) *
         std::pow(2.0 * boltzmann * t, k.d) * sampling_constant(k.d);
}

double q_rel_inv_fast_limit(double scale) { return scale * pi / 6.0; }

double relaxation_scale(const TlsParams& p, double f0, const RelaxKernelParams& k) {
  return p.f_tan_rel / q_rel_inv_slow_limit(p.t0, f0, 1.0, k);
}

double dfrac_rel(double t, double f0, double scale, const RelaxKernelParams& k) {
  if (scale < 0.0) throw DomainError("dfrac_rel: scale must be >= 0");
  if (scale == 0.0) return 0.0;
  return -scale / 6.0 * outer_integral(t, f0, k, relaxation_inner_shift, "dfrac_rel");
}

RelaxationTable::RelaxationTable(double f0, const RelaxKernelParams& k, double t_min,
                                 double t_max, int points)
    : f0_(f0), kernel_(k), t_min_(t_min), t_max_(t_max) {
  if (!(t_min > 0.0) || !(t_max > t_min) || points < 4)
    throw std::invalid_argument("RelaxationTable: need 0 < t_min < t_max and >= 4 points");
  std::vector<double> x(points), y(points);
  const double lo = std::log(t_min), hi = std::log(t_max);
  for (int i = 0; i < points; ++i) {
    x[i] = lo + (hi - lo) * i / (points - 1);
    y[i] = std::log(q_rel_inv_full(std::exp(x[i]), f0, 1.0, k));
  }
  log_g_ = numerics::CubicSpline(std::move(x), std::move(y));
}

double RelaxationTable::unit(double t) const {
  if (!(t >= t_min_ && t <= t_max_)) return q_rel_inv_full(t, f0_, 1.0, kernel_);
  return std::exp(log_g_(std::log(t)));
}

double RelaxationTable::normalized(double t, double t0) const {
  return unit(t) / q_rel_inv_slow_limit(t0, f0_, 1.0, kernel_);
}

}  // namespace tlsloss::tlsmodel
