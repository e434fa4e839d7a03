#pragma once

#include <complex>

namespace tlsloss::response {

struct ResonatorSigmas {
  double f0 = 0.0;
  double q_total_inv = 0.0;
  double q_ext_inv_mag = 0.0;
  double phi = 0.0;
  double q_int_inv = 0.0;
};

struct ResonatorParams {
  double f0 = 0.0;             // Hz
  double q_total_inv = 0.0;    // 1/Q
  double q_ext_inv_mag = 0.0;  // |1/Qe|
  double phi = 0.0;            // rad, argument of the complex 1/Qe
  double q_int_inv = 0.0;      // 1/Qi = 1/Q - |1/Qe| cos(phi)
  ResonatorSigmas sigmas;

  // Recompute q_int_inv from the other three fields.
  void update_internal();
  void validate() const;
};

// Build a parameter set from internal and external loss.
ResonatorParams make_resonator(double f0, double q_int_inv, double q_ext_inv_mag, double phi = 0.0);

// Notch-type transmission 1 - Q |Qe^-1| e^{i phi} / (1 + 2iQ (f - f0)/f0).
std::complex<double> s21_model(double f, const ResonatorParams& p);

// Intracavity photon number for incident power p_inc (W) and drive detuning (Hz).
double photon_number(const ResonatorParams& p, double p_inc, double detuning);

// Incident power that yields photon number n at the given detuning.
double incident_power_for(const ResonatorParams& p, double n, double detuning);

}  // namespace tlsloss::response
