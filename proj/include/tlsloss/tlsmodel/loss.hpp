#pragma once

#include "tlsloss/tlsmodel/params.hpp"

namespace tlsloss::tlsmodel {

// Resonant (saturable) TLS loss: f_tan_res * tanh(hbar w0 / 2kT) / sqrt(1 + n/n_c).
double q_res_inv(double n, double t, double f0, const TlsParams& p);

// Relaxation loss, phenomenological power law f_tan_rel * (T/t0)^d.
double q_rel_inv_powerlaw(double t, const TlsParams& p);

// Area of the unit sphere S^{d-1} embedded in R^d: 2, 2 pi, 4 pi.
double unit_sphere_area(int d);

// Prefactor K_d of the minimum relaxation rate, tau_min^-1 = K_d E^d coth(E/2kT),
// in s^-1 J^-d.
double relaxation_rate_constant(const RelaxKernelParams& k);

// One-phonon minimum relaxation rate (tunnelling strength equal to E), 1/s.
double tau_min_inv(double energy, double t, const RelaxKernelParams& k);

// Thermal-quasiparticle loss in the low-temperature, low-frequency limit.
// Throws DomainError unless 0 < T < tc/2.
double q_qp_inv(double t, const QpParams& qp);

// xi^d sech^2(xi) coth(xi) with xi = E / 2kT: which TLS energies carry the
// slow-relaxation loss.
double rel_sampling_integrand(double energy, double t, int d);

// Integral of xi^d sech^2(xi) coth(xi) over (0, inf), closed forms:
// pi^2/8, 7 zeta(3)/8, pi^4/64 for d = 1, 2, 3.
double sampling_constant(int d);

}  // namespace tlsloss::tlsmodel
