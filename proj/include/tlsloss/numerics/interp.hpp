#pragma once

#include <vector>

namespace tlsloss::numerics {

// Natural cubic spline through (x_i, y_i), x strictly increasing.
// Outside [x_0, x_n] the end cubic is extrapolated; callers guard the range.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

private:
  std::vector<double> x_, y_, m_;  // m = second derivatives
};

}  // namespace tlsloss::numerics
