#include "tlsloss/numerics/polyfit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>

#include "tlsloss/error.hpp"

namespace tlsloss::numerics {

Polynomial::Polynomial(double origin, double scale, std::vector<double> scaled_coefficients)
    : origin_(origin), scale_(scale), coeffs_(std::move(scaled_coefficients)) {}

double Polynomial::operator()(double x) const {
  const double t = (x - origin_) / scale_;
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

std::vector<double> Polynomial::coefficients() const {
  // sum_k a_k ((x - o)/s)^k expanded with the binomial theorem.
  const std::size_t n = coeffs_.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double ak = coeffs_[k] / std::pow(scale_, static_cast<double>(k));
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      out[j] += ak * binom * std::pow(-origin_, static_cast<double>(k - j));
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }
  return out;
}

Polynomial polyfit(std::span<const double> x, std::span<const double> y, int degree) {
  if (x.size() != y.size()) throw std::invalid_argument("polyfit: x and y lengths differ");
  if (degree < 0) throw std::invalid_argument("polyfit: negative degree");
  const std::set<double> distinct(x.begin(), x.end());
  if (static_cast<int>(distinct.size()) <= degree)
    throw DegenerateError("polyfit: need more distinct abscissae than the degree");

  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double origin = 0.5 * (*lo + *hi);
  const double scale = std::max(0.5 * (*hi - *lo), 1e-300);

  const auto m = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(m, degree + 1);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double t = (x[static_cast<std::size_t>(i)] - origin) / scale;
    double power = 1.0;
    for (int k = 0; k <= degree; ++k) {
      design(i, k) = power;
      power *= t;
    }
    rhs[i] = y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-13);
  if (qr.rank() < degree + 1) throw DegenerateError("polyfit: design matrix is rank deficient");
  const Eigen::VectorXd c = qr.solve(rhs);
  return Polynomial(origin, scale, std::vector<double>(c.data(), c.data() + c.size()));
}

}  // namespace tlsloss::numerics
