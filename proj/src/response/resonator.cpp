#include "tlsloss/response/resonator.hpp"

#include <cmath>
#include <numbers>

#include "tlsloss/constants.hpp"
#include "tlsloss/error.hpp"

namespace tlsloss::response {

using std::numbers::pi;

void ResonatorParams::update_internal() { q_int_inv = q_total_inv - q_ext_inv_mag * std::cos(phi); }

void ResonatorParams::validate() const {
  if (!(f0 > 0.0) || !std::isfinite(f0)) throw DomainError("ResonatorParams: f0 must be > 0");
  if (!(q_total_inv > 0.0) || !std::isfinite(q_total_inv))
    throw DomainError("ResonatorParams: q_total_inv must be > 0");
  if (!(q_ext_inv_mag > 0.0) || !std::isfinite(q_ext_inv_mag))
    throw DomainError("ResonatorParams: q_ext_inv_mag must be > 0");
  if (!std::isfinite(phi)) throw DomainError("ResonatorParams: phi must be finite");
}

ResonatorParams make_resonator(double f0, double q_int_inv, double q_ext_inv_mag, double phi) {
  ResonatorParams p;
  p.f0 = f0;
  p.q_ext_inv_mag = q_ext_inv_mag;
  p.phi = phi;
  p.q_total_inv = q_int_inv + q_ext_inv_mag * std::cos(phi);
  p.q_int_inv = q_int_inv;
  p.validate();
  return p;
}

std::complex<double> s21_model(double f, const ResonatorParams& p) {
  const double q = 1.0 / p.q_total_inv;
  const std::complex<double> num = q * p.q_ext_inv_mag * std::polar(1.0, p.phi);
  const std::complex<double> den(1.0, 2.0 * q * (f - p.f0) / p.f0);
  return 1.0 - num / den;
}

double photon_number(const ResonatorParams& p, double p_inc, double detuning) {
  p.validate();
  if (p_inc < 0.0) throw DomainError("photon_number: incident power must be >= 0");
  const double omega0 = 2.0 * pi * p.f0;
  const double x = detuning / p.f0;  // Delta_p / omega0
  const double lorentz = 0.5 * p.q_ext_inv_mag /
                         (0.25 * p.q_total_inv * p.q_total_inv + x * x);
  return p_inc / (constants::hbar * omega0 * omega0) * lorentz;
}

double incident_power_for(const ResonatorParams& p, double n, double detuning) {
  if (n < 0.0) throw DomainError("incident_power_for: photon number must be >= 0");
  return n / photon_number(p, 1.0, detuning);
}

}  // namespace tlsloss::response
