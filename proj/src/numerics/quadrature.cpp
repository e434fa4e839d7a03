#include "tlsloss/numerics/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tlsloss/error.hpp"

namespace tlsloss::numerics {
namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct BadParameter { double u; };
struct BadAbscissa { double x; };

struct Segment {
  double a, b;
  double value;
  double error;
  double abs_value;
};

struct ByError {
  bool operator()(const Segment& lhs, const Segment& rhs) const {
    if (lhs.error != rhs.error) return lhs.error < rhs.error;
    return lhs.a > rhs.a;  // deterministic tie-break
  }
};

// The caller maps evaluation failures back to the original variable.
class Evaluator {
public:
  explicit Evaluator(const std::function<double(double)>& g) : g_(g) {}

  Segment rule(double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = call(center);
    double result_k = fc * kWgk[7];
    double result_g = fc * kWg[3];
    double result_abs = std::abs(result_k);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
      const double dx = half * kXgk[j];
      f1[j] = call(center - dx);
      f2[j] = call(center + dx);
      const double sum = f1[j] + f2[j];
      result_k += kWgk[j] * sum;
      result_abs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
      if (j % 2 == 1) result_g += kWg[j / 2] * sum;
    }
    const double mean = 0.5 * result_k;
    double result_asc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
      result_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double value = result_k * half;
    result_abs *= std::abs(half);
    result_asc *= std::abs(half);
    double err = std::abs((result_k - result_g) * half);
    if (result_asc != 0.0 && err != 0.0)
      err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
    if (result_abs > std::numeric_limits<double>::min() / (50.0 * kEps))
      err = std::max(50.0 * kEps * result_abs, err);
    return {a, b, value, err, result_abs};
  }

  std::size_t evaluations() const { return count_; }

private:
  double call(double u) {
    ++count_;
    const double v = g_(u);
    if (!std::isfinite(v)) throw BadParameter{u};
    return v;
  }

  const std::function<double(double)>& g_;
  std::size_t count_ = 0;
};

QuadratureResult adaptive(const std::function<double(double)>& g, double a, double b,
                          double rel_tol, double abs_tol, std::size_t max_subdivisions) {
  Evaluator eval(g);
  std::priority_queue<Segment, std::vector<Segment>, ByError> active;
  std::vector<Segment> frozen;  // too narrow to split any further

  active.push(eval.rule(a, b));
  std::size_t subdivisions = 0;

  auto totals = [&]() {
    // Rebuilt from scratch so that running-sum drift never matters.
    std::vector<Segment> all(frozen);
    auto copy = active;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Segment& l, const Segment& r) { return l.a < r.a; });
    double value = 0.0, error = 0.0;
    for (const auto& s : all) {
      value += s.value;
      error += s.error;
    }
    return std::pair{value, error};
  };

  double value = active.top().value;
  double error = active.top().error;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (active.empty()) break;
    if (subdivisions >= max_subdivisions) {
      std::ostringstream msg;
      msg << "integrate: tolerance not met after " << subdivisions
          << " subdivisions (estimate " << value << " +/- " << error << ")";
      throw QuadratureError(msg.str(), value, error);
    }
    Segment worst = active.top();
    active.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const double width = worst.b - worst.a;
    if (width <= 100.0 * kEps * std::max(std::abs(mid), 1e-300) || mid <= worst.a ||
        mid >= worst.b) {
      frozen.push_back(worst);
      continue;
    }
    const Segment left = eval.rule(worst.a, mid);
    const Segment right = eval.rule(mid, worst.b);
    active.push(left);
    active.push(right);
    ++subdivisions;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
  }

  auto [v, e] = totals();
  double abs_sum = 0.0;
  for (const auto& s : frozen) abs_sum += s.abs_value;
  if (active.empty() && e > std::max(abs_tol, rel_tol * std::abs(v)) &&
      e > 1e3 * kEps * abs_sum) {
    std::ostringstream msg;
    msg << "integrate: roundoff limits accuracy (estimate " << v << " +/- " << e << ")";
    throw QuadratureError(msg.str(), v, e);
  }
  return {v, e, eval.evaluations(), subdivisions};
}

}  // namespace

QuadratureResult integrate_finite(const Integrand& f, double a, double b, double rel_tol,
                                  double abs_tol, std::size_t max_subdivisions) {
  QuadratureSpec spec;
  spec.lower = a;
  spec.upper = b;
  spec.rel_tol = rel_tol;
  spec.abs_tol = abs_tol;
  spec.max_subdivisions = max_subdivisions;
  return integrate(f, spec);
}

QuadratureResult integrate(const Integrand& f, const QuadratureSpec& spec) {
  if (!(spec.rel_tol > 0.0) || spec.abs_tol < 0.0)
    throw std::invalid_argument("integrate: need rel_tol > 0 and abs_tol >= 0");
  if (!std::isfinite(spec.lower))
    throw std::invalid_argument("integrate: lower limit must be finite");
  if (std::isnan(spec.upper) || spec.upper == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("integrate: upper limit must be finite or +inf");

  const double a = spec.lower;
  const double b = spec.upper;
  const bool infinite = std::isinf(b);
  if (!infinite && b < a) {
    QuadratureSpec flipped = spec;
    flipped.lower = b;
    flipped.upper = a;
    if (spec.singularity == Singularity::lower_sqrt) flipped.singularity = Singularity::upper_sqrt;
    else if (spec.singularity == Singularity::upper_sqrt) flipped.singularity = Singularity::lower_sqrt;
    auto r = integrate(f, flipped);
    r.value = -r.value;
    return r;
  }
  if (!infinite && a == b) return {};
  if (infinite && spec.singularity == Singularity::upper_sqrt)
    throw std::invalid_argument("integrate: upper singularity needs a finite upper limit");

  // Map to a finite parameter u in [u0, u1] with x = map(u), dx = jac(u) du.
  std::function<double(double)> to_x;
  std::function<double(double)> jacobian;
  double u0 = 0.0, u1 = 1.0;
  if (infinite) {
    if (spec.singularity == Singularity::lower_sqrt && a > 0.0) {
      to_x = [a](double u) { return a / (1.0 - u * u); };
      jacobian = [a](double u) {
        const double s = 1.0 - u * u;
        return 2.0 * a * u / (s * s);
      };
    } else if (spec.singularity == Singularity::lower_sqrt) {
      to_x = [a](double u) { return a + u * u / (1.0 - u * u); };
      jacobian = [](double u) {
        const double s = 1.0 - u * u;
        return 2.0 * u / (s * s);
      };
    } else {
      to_x = [a](double t) { return a + t / (1.0 - t); };
      jacobian = [](double t) {
        const double s = 1.0 - t;
        return 1.0 / (s * s);
      };
    }
  } else {
    switch (spec.singularity) {
      case Singularity::none:
        to_x = [](double x) { return x; };
        jacobian = [](double) { return 1.0; };
        u0 = a;
        u1 = b;
        break;
      case Singularity::lower_sqrt:
        to_x = [a](double u) { return a + u * u; };
        jacobian = [](double u) { return 2.0 * u; };
        u1 = std::sqrt(b - a);
        break;
      case Singularity::upper_sqrt:
        to_x = [b](double u) { return b - u * u; };
        jacobian = [](double u) { return 2.0 * u; };
        u1 = std::sqrt(b - a);
        break;
    }
  }

  const std::function<double(double)> g = [&](double u) {
    const double x = to_x(u);
    const double fx = f(x);
    if (!std::isfinite(fx)) throw BadAbscissa{x};
    const double j = jacobian(u);
    if (fx == 0.0) return 0.0;
    return fx * j;
  };

  auto fail = [](double x) -> QuadratureError {
    std::ostringstream msg;
    msg << "integrate: non-finite integrand at x = " << x;
    return QuadratureError(msg.str(), std::numeric_limits<double>::quiet_NaN(),
                           std::numeric_limits<double>::infinity(), x);
  };
  try {
    return adaptive(g, u0, u1, spec.rel_tol, spec.abs_tol, spec.max_subdivisions);
  } catch (const BadAbscissa& bad) {
    throw fail(bad.x);
  } catch (const BadParameter& bad) {
    throw fail(to_x(bad.u));
  }
}

}  // namespace tlsloss::numerics
