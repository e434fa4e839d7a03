#include "tlsloss/ftir/hydrogen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tlsloss/error.hpp"

namespace tlsloss::ftir {

HydrogenResult hydrogen_content(const PeakModel& sih, const PeakModel& nh, double thickness_cm,
                                const HydrogenCalibration& cal) {
  if (!(thickness_cm > 0.0)) throw DomainError("hydrogen_content: thickness must be > 0");
  if (!(cal.sigma_sih > 0.0) || !(cal.sigma_nh > 0.0)) throw DomainError("hydrogen_content: cross sections must be > 0");
  if (!(cal.matrix_density > 0.0)) throw DomainError("hydrogen_content: matrix density must be > 0");
  const double k = cal.decadic_absorbance ? std::numbers::ln10 : 1.0;
  HydrogenResult r;
  // Negative areas (noise on an absent line) count as zero density.
  r.n_sih = k * std::max(sih.area, 0.0) / (cal.sigma_sih * thickness_cm);
  r.n_nh = k * std::max(nh.area, 0.0) / (cal.sigma_nh * thickness_cm);
  r.sigma_n_sih = k * sih.sigmas.area / (cal.sigma_sih * thickness_cm);
  r.sigma_n_nh = k * nh.sigmas.area / (cal.sigma_nh * thickness_cm);
  const double h = r.n_sih + r.n_nh;
  const double m = cal.matrix_density;
  r.atomic_h_percent = 100.0 * h / (m + h);
  const double dpdh = 100.0 * m / ((m + h) * (m + h));
  r.sigma_percent = dpdh * std::hypot(r.sigma_n_sih, r.sigma_n_nh);
  r.upper_limit = sih.upper_limit || nh.upper_limit;
  return r;
}

}  // namespace tlsloss::ftir
