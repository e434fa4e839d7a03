#pragma once

#include <numbers>

namespace tlsloss::constants {

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double planck = 6.62607015e-34;                    // J s
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);   // J s
inline constexpr double boltzmann = 1.380649e-23;                   // J / K
inline constexpr double euler_gamma = std::numbers::egamma;

// BCS weak-coupling gap ratio Delta(0) / (k_B Tc).
inline constexpr double bcs_gap_ratio = 1.76;

}  // namespace tlsloss::constants
