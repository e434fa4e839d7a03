#pragma once

#include <optional>

namespace tlsloss::tlsmodel {

// Phenomenological TLS prefactors for one resonator. The loss tangents already
// include the participation ratio (F_SiN * tan_delta).
struct TlsParams {
  double f_tan_res = 0.0;        // resonant prefactor
  double n_c = 1.0;              // critical photon number
  double f_tan_rel = 0.0;        // relaxation loss at t0 in the slow-relaxation limit
  double t0 = 0.5;               // K
  int d = 2;                     // phonon-bath dimensionality
  double q_bg_inv = 0.0;         // constant background loss
  // Frequency-shift prefactors. Unset means "derive from the loss tangents"
  // (resonant: f_tan_res / pi; relaxation: the calibrated relaxation scale).
  std::optional<double> shift_res_scale;
  std::optional<double> shift_rel_scale;

  void validate() const;
};

// One-phonon relaxation kernel. rho_d is a d-dimensional mass density
// (kg/m^3, kg/m^2, kg/m for d = 3, 2, 1).
struct RelaxKernelParams {
  double gamma_bar = 1.602176634e-19;  // J (1 eV elastic dipole)
  double v_bar = 6000.0;               // m/s
  double rho_d = 3100.0;
  int d = 3;

  void validate() const;
  // Defaults used throughout: bulk Si3N4-like density thinned to a film of
  // 100 nm (d = 2) or a 100 nm x 1 um strip (d = 1).
  static RelaxKernelParams defaults(int d);
};

struct QpParams {
  double tc = 15.0;         // K
  double alpha_kin = 1.0;   // kinetic-inductance fraction, 1 = upper bound
  double f0 = 6e9;          // Hz

  void validate() const;
};

// Effective temperature T_eff(n) = t_bp + a_coeff * n^beta.
struct SelfHeatingLaw {
  double a_coeff = 0.0;  // K
  double beta = 0.5;
  double t_bp = 0.01;    // K

  double heating(double n) const;
  double t_eff(double n, double t_bp_override) const { return t_bp_override + heating(n); }
  void validate() const;
};

// Which contributions of the total loss are evaluated.
struct ModelTerms {
  bool background = true;
  bool resonant = true;
  bool relaxation = true;
  bool quasiparticle = true;
  bool self_heating = true;
};

// Temperature above which the one-phonon / power-law picture is not trusted.
inline constexpr double kTemperatureValidityCap = 2.0;

}  // namespace tlsloss::tlsmodel
