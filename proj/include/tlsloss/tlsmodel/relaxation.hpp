#pragma once

#include <vector>

#include "tlsloss/numerics/interp.hpp"
#include "tlsloss/tlsmodel/params.hpp"

namespace tlsloss::tlsmodel {

// The relaxation double integral over TLS energy E and relaxation time tau is
// evaluated in the reduced variables xi = E / 2kT and u, tau = tau_min/(1-u^2).
// With c = w0 tau_min(E) the inner tau integral becomes
//   h(c) = 2c int_0^1 u^2 / ((1-u^2)^2 + c^2) du           (loss)
//   j(c) = int_0^1 2u^2 (1-u^2) / ((1-u^2)^2 + c^2) du     (frequency shift)
// both smooth in u, so no endpoint singularity is left for the quadrature.
double relaxation_inner_loss(double c);
double relaxation_inner_shift(double c);

// c = w0 * tau_min at reduced energy xi.
double omega_tau_min(double xi, double t, double f0, const RelaxKernelParams& k);

// Upper cut of the energy integral: sech^2(xi) < 1e-16 beyond it.
double relaxation_xi_max();

// Full relaxation loss. `scale` is the dimensionless microscopic strength
// P |p0|^2 / eps; the result is scale/3 * int sech^2(xi) h(c(xi)) dxi.
// Throws QuadratureError carrying T and the energy range on failure.
double q_rel_inv_full(double t, double f0, double scale, const RelaxKernelParams& k);

// Slow-relaxation limit (w0 tau_min >> 1):
//   2 scale / (9 w0) * K_d (2kT)^d * C_d,  i.e. proportional to T^d.
double q_rel_inv_slow_limit(double t, double f0, double scale, const RelaxKernelParams& k);

// Fast-relaxation limit (w0 tau_min << 1): scale * pi / 6, independent of T.
double q_rel_inv_fast_limit(double scale);

// Scale for which the slow-relaxation limit equals p.f_tan_rel at T = p.t0.
double relaxation_scale(const TlsParams& p, double f0, const RelaxKernelParams& k);

// Relaxation frequency shift, -(scale/6) int sech^2(xi) j(c(xi)) dxi (always <= 0).
double dfrac_rel(double t, double f0, double scale, const RelaxKernelParams& k);

// Log-log cubic-spline table of the unit-scale relaxation integral for one
// resonator frequency, for use inside fits. Outside the tabulated range the
// integral is evaluated directly, so the table never extrapolates.
class RelaxationTable {
public:
  RelaxationTable(double f0, const RelaxKernelParams& k, double t_min = 1e-3, double t_max = 5.0,
                  int points = 161);

  // Unit-scale integral G(T), q_rel_inv_full(T) = scale * G(T).
  double unit(double t) const;
  // G(T) / (slow-relaxation limit of G at t0): multiply by f_tan_rel.
  double normalized(double t, double t0) const;

  double f0() const { return f0_; }
  const RelaxKernelParams& kernel() const { return kernel_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }

private:
  double f0_;
  RelaxKernelParams kernel_;
  double t_min_, t_max_;
  numerics::CubicSpline log_g_;
};

}  // namespace tlsloss::tlsmodel
