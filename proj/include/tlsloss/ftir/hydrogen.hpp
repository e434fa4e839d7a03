#pragma once

#include "tlsloss/ftir/peaks.hpp"

namespace tlsloss::ftir {

// Calibration constants converting integrated absorption into bond densities.
struct HydrogenCalibration {
  double sigma_sih = 7.4e-18;        // cm^2, Si-H stretch cross section
  double sigma_nh = 5.3e-18;         // cm^2, N-H stretch cross section
  double matrix_density = 9.3e22;    // atoms/cm^3, [Si] + [N] of stoichiometric SiN
  bool decadic_absorbance = true;    // multiply areas by ln 10 (absorbance -> absorption coefficient)
};

struct HydrogenResult {
  double n_sih = 0.0;               // bonds/cm^3
  double n_nh = 0.0;                // bonds/cm^3
  double atomic_h_percent = 0.0;    // %
  double sigma_n_sih = 0.0;
  double sigma_n_nh = 0.0;
  double sigma_percent = 0.0;
  bool upper_limit = false;         // either peak was only an upper limit
};

// Bond densities area / (cross section * thickness) and the atomic hydrogen
// fraction H / (matrix + H) in percent; uncertainties propagated linearly.
HydrogenResult hydrogen_content(const PeakModel& sih, const PeakModel& nh, double thickness_cm,
                                const HydrogenCalibration& cal = {});

}  // namespace tlsloss::ftir
