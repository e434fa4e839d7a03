#include "tlsloss/tlsmodel/loss.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tlsloss/constants.hpp"
#include "tlsloss/error.hpp"
#include "tlsloss/numerics/special.hpp"

namespace tlsloss::tlsmodel {

using constants::boltzmann;
using constants::hbar;
using std::numbers::pi;

namespace {

void require_positive_temperature(double t, const char* who) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << who << ": temperature must be > 0 (got " << t << " K)";
    throw DomainError(msg.str());
  }
}

}  // namespace

double q_res_inv(double n, double t, double f0, const TlsParams& p) {
  require_positive_temperature(t, "q_res_inv");
  if (n < 0.0) throw DomainError("q_res_inv: photon number must be >= 0");
  const double omega = 2.0 * pi * f0;
  return p.f_tan_res * std::tanh(hbar * omega / (2.0 * boltzmann * t)) / std::sqrt(1.0 + n / p.n_c);
}

double q_rel_inv_powerlaw(double t, const TlsParams& p) {
  require_positive_temperature(t, "q_rel_inv_powerlaw");
  return p.f_tan_rel * std::pow(t / p.t0, p.d);
}

double unit_sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    case 3: return 4.0 * pi;
    default: throw DomainError("unit_sphere_area: d must be 1, 2 or 3");
  }
}

double relaxation_rate_constant(const RelaxKernelParams& k) {
  k.validate();
  const int d = k.d;
  const double geometric = pi * unit_sphere_area(d) / std::pow(2.0 * pi, d);
  return k.gamma_bar * k.gamma_bar / std::pow(k.v_bar, d + 2) * geometric /
         (std::pow(hbar, d + 1) * k.rho_d);
}

double tau_min_inv(double energy, double t, const RelaxKernelParams& k) {
  require_positive_temperature(t, "tau_min_inv");
  if (!(energy > 0.0)) throw DomainError("tau_min_inv: energy must be > 0");
  const double xi = energy / (2.0 * boltzmann * t);
  return relaxation_rate_constant(k) * std::pow(energy, k.d) * numerics::coth(xi);
}

double q_qp_inv(double t, const QpParams& qp) {
  qp.validate();
  if (!(t > 0.0) || !(t < 0.5 * qp.tc)) {
    std::ostringstream msg;
    msg << "q_qp_inv: temperature " << t << " K outside (0, tc/2 = " << 0.5 * qp.tc << " K)";
    throw DomainError(msg.str());
  }
  if (qp.alpha_kin == 0.0) return 0.0;
  const double gap = constants::bcs_gap_ratio * boltzmann * qp.tc;
  const double hw = hbar * 2.0 * pi * qp.f0;
  const double xi = hw / (2.0 * boltzmann * t);
  const double sigma1 = (4.0 / pi) * std::exp(-gap / (boltzmann * t)) * std::sinh(xi) *
                        numerics::bessel_k0(xi);
  return qp.alpha_kin * sigma1 / (pi * gap / hw);
}

double rel_sampling_integrand(double energy, double t, int d) {
  require_positive_temperature(t, "rel_sampling_integrand");
  if (!(energy > 0.0)) throw DomainError("rel_sampling_integrand: energy must be > 0");
  if (d < 1 || d > 3) throw DomainError("rel_sampling_integrand: d must be 1, 2 or 3");
  const double xi = energy / (2.0 * boltzmann * t);
  // xi^d coth(xi) written as xi^(d-1) * (xi coth xi) to stay finite at small xi.
  const double xi_coth = xi < 1e-8 ? 1.0 + xi * xi / 3.0 : xi / std::tanh(xi);
  return std::pow(xi, d - 1) * xi_coth * numerics::sech2(xi);
}

double sampling_constant(int d) {
  switch (d) {
    case 1: return pi * pi / 8.0;
    case 2: return 7.0 * 1.2020569031595942 / 8.0;  // 7 zeta(3) / 8
    case 3: return std::pow(pi, 4) / 64.0;
    default: throw DomainError("sampling_constant: d must be 1, 2 or 3");
  }
}

}  // namespace tlsloss::tlsmodel
