#include "tlsloss/tlsmodel/params.hpp"

#include <cmath>
#include <string>

#include "tlsloss/error.hpp"

namespace tlsloss::tlsmodel {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

void TlsParams::validate() const {
  require(f_tan_res >= 0.0 && std::isfinite(f_tan_res), "TlsParams: f_tan_res must be >= 0");
  require(f_tan_rel >= 0.0 && std::isfinite(f_tan_rel), "TlsParams: f_tan_rel must be >= 0");
  require(q_bg_inv >= 0.0 && std::isfinite(q_bg_inv), "TlsParams: q_bg_inv must be >= 0");
  require(n_c > 0.0 && std::isfinite(n_c), "TlsParams: n_c must be > 0");
  require(t0 > 0.0 && std::isfinite(t0), "TlsParams: t0 must be > 0");
  require(d >= 1 && d <= 3, "TlsParams: d must be 1, 2 or 3");
}

void RelaxKernelParams::validate() const {
  require(gamma_bar > 0.0 && v_bar > 0.0 && rho_d > 0.0,
          "RelaxKernelParams: gamma_bar, v_bar and rho_d must be > 0");
  require(d >= 1 && d <= 3, "RelaxKernelParams: d must be 1, 2 or 3");
}

RelaxKernelParams RelaxKernelParams::defaults(int d) {
  RelaxKernelParams k;
  k.d = d;
  switch (d) {
    case 1: k.rho_d = 3100.0 * 1e-7 * 1e-6; break;  // 100 nm x 1 um cross-section
    case 2: k.rho_d = 3100.0 * 1e-7; break;         // 100 nm film
    case 3: k.rho_d = 3100.0; break;
    default: throw DomainError("RelaxKernelParams::defaults: d must be 1, 2 or 3");
  }
  return k;
}

void QpParams::validate() const {
  require(tc > 0.0, "QpParams: tc must be > 0");
  require(alpha_kin >= 0.0 && alpha_kin <= 1.0, "QpParams: alpha_kin must lie in [0, 1]");
  require(f0 > 0.0, "QpParams: f0 must be > 0");
}

double SelfHeatingLaw::heating(double n) const {
  if (a_coeff == 0.0 || n <= 0.0) return 0.0;
  return a_coeff * std::pow(n, beta);
}

void SelfHeatingLaw::validate() const {
  require(a_coeff >= 0.0, "SelfHeatingLaw: a_coeff must be >= 0");
  require(beta > 0.0 && beta < 2.0, "SelfHeatingLaw: beta must lie in (0, 2)");
  require(t_bp >= 0.0, "SelfHeatingLaw: t_bp must be >= 0");
}

}  // namespace tlsloss::tlsmodel
