#include "tlsloss/response/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "tlsloss/error.hpp"
#include "tlsloss/numerics/least_squares.hpp"
#include "tlsloss/numerics/polyfit.hpp"

namespace tlsloss::response {

using cplx = std::complex<double>;
using std::numbers::pi;

namespace {

struct Sorted {
  std::vector<double> f;
  std::vector<cplx> s;
};

Sorted sorted_copy(const FrequencySweep& sweep) {
  sweep.validate();
  Sorted out{sweep.freqs, sweep.s21};
  if (out.f.front() > out.f.back()) {
    std::reverse(out.f.begin(), out.f.end());
    std::reverse(out.s.begin(), out.s.end());
  }
  return out;
}

std::size_t edge_count(std::size_t n, double fraction) {
  if (!(fraction > 0.0 && fraction < 0.5))
    throw DomainError("normalize_sweep: edge fraction must lie in (0, 0.5)");
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (k < 3) {
    std::ostringstream msg;
    msg << "sweep of " << n << " points is too narrow to estimate a baseline from "
        << fraction * 100.0 << "% edge windows (need >= 3 points per edge)";
    throw DegenerateError(msg.str());
  }
  return k;
}

std::vector<double> unwrapped_phase(const std::vector<cplx>& s, std::size_t begin, std::size_t end) {
  std::vector<double> ph;
  ph.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    double a = std::arg(s[i]);
    if (!ph.empty()) a += 2.0 * pi * std::round((ph.back() - a) / (2.0 * pi));
    ph.push_back(a);
  }
  return ph;
}

double noise_from_edges(const Sorted& d, std::size_t k) {
  // successive differences remove smooth structure; var(diff) = 2 sigma^2
  double sum = 0.0;
  std::size_t count = 0;
  auto accumulate = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin + 1; i < end; ++i) {
      const cplx diff = d.s[i] - d.s[i - 1];
      sum += diff.real() * diff.real() + diff.imag() * diff.imag();
      count += 2;
    }
  };
  accumulate(0, k);
  accumulate(d.f.size() - k, d.f.size());
  return count ? std::sqrt(sum / count / 2.0) : 0.0;
}

Baseline edge_baseline(const Sorted& d, std::size_t k) {
  const std::size_t n = d.f.size();
  Baseline b;
  b.centre = 0.5 * (d.f.front() + d.f.back());
  b.half_span = 0.5 * (d.f.back() - d.f.front());
  std::vector<double> x, amp;
  for (std::size_t i = 0; i < k; ++i) {
    x.push_back((d.f[i] - b.centre) / b.half_span);
    amp.push_back(std::abs(d.s[i]));
  }
  for (std::size_t i = n - k; i < n; ++i) {
    x.push_back((d.f[i] - b.centre) / b.half_span);
    amp.push_back(std::abs(d.s[i]));
  }
  const auto amp_fit = numerics::polyfit(x, amp, 1).coefficients();
  b.a0 = amp_fit[0];
  b.a1 = amp_fit[1];

  // Phase: unwrap each edge on its own, then place the right edge on the
  // 2 pi branch predicted by the mean within-edge slope (a dip that encircles
  // the origin would otherwise add a spurious 2 pi between the edges).
  const auto left = unwrapped_phase(d.s, 0, k);
  const auto right = unwrapped_phase(d.s, n - k, n);
  const std::vector<double> xl(x.begin(), x.begin() + static_cast<long>(k));
  const std::vector<double> xr(x.begin() + static_cast<long>(k), x.end());
  const auto fl = numerics::polyfit(xl, left, 1).coefficients();
  const auto fr = numerics::polyfit(xr, right, 1).coefficients();
  const double slope = 0.5 * (fl[1] + fr[1]);
  const double xl_mean = std::accumulate(xl.begin(), xl.end(), 0.0) / k;
  const double xr_mean = std::accumulate(xr.begin(), xr.end(), 0.0) / k;
  const double left_mean = std::accumulate(left.begin(), left.end(), 0.0) / k;
  const double right_mean = std::accumulate(right.begin(), right.end(), 0.0) / k;
  const double predicted = left_mean + slope * (xr_mean - xl_mean);
  const double shift = 2.0 * pi * std::round((predicted - right_mean) / (2.0 * pi));
  std::vector<double> phase(left);
  for (double r : right) phase.push_back(r + shift);
  const auto ph_fit = numerics::polyfit(x, phase, 1).coefficients();
  b.theta0 = ph_fit[0];
  b.theta1 = ph_fit[1];
  return b;
}

// Parameter scaling for the notch fit: f0 = f_ref + p0 * w_ref, 1/Q = p1 * q_ref,
// |1/Qe| = p2 * q_ref, phi = p3.
struct Scaling {
  double f_ref, q_ref;
  double w_ref() const { return f_ref * q_ref; }
};

cplx notch(const Eigen::VectorXd& p, double f, const Scaling& sc) {
  const double f0 = sc.f_ref + p[0] * sc.w_ref();
  const double qinv = p[1] * sc.q_ref;
  const double qe = p[2] * sc.q_ref;
  const cplx num = (qe / qinv) * std::polar(1.0, p[3]);
  const cplx den(1.0, 2.0 * (f - f0) / (f0 * qinv));
  return 1.0 - num / den;
}

cplx baseline_at(const Eigen::VectorXd& p, double f, const Baseline& frame) {
  const double x = (f - frame.centre) / frame.half_span;
  return (p[4] + p[5] * x) * std::polar(1.0, p[6] + p[7] * x);
}

struct CoreFit {
  numerics::FitResult fit;
  Scaling scaling;
};

CoreFit fit_core(const Sorted& d, const ResonatorParams& init, const Baseline* baseline) {
  CoreFit out;
  out.scaling = {init.f0, init.q_total_inv};
  const Scaling sc = out.scaling;
  const std::size_t n = d.f.size();
  numerics::FitProblem pb;
  const Eigen::Index np = baseline ? 8 : 4;
  pb.initial.resize(np);
  pb.initial << 0.0, 1.0, init.q_ext_inv_mag / init.q_total_inv, init.phi;
  pb.lower = Eigen::VectorXd::Constant(np, -std::numeric_limits<double>::infinity());
  pb.upper = Eigen::VectorXd::Constant(np, std::numeric_limits<double>::infinity());
  pb.lower[1] = 1e-6;
  pb.lower[2] = 1e-9;
  pb.lower[3] = -pi;
  pb.upper[3] = pi;
  if (baseline) {
    pb.initial.tail(4) << baseline->a0, baseline->a1, baseline->theta0, baseline->theta1;
  }
  pb.residuals = [&d, sc, baseline, n](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      cplx m = notch(p, d.f[i], sc);
      if (baseline) m *= baseline_at(p, d.f[i], *baseline);
      const cplx diff = m - d.s[i];
      r[static_cast<Eigen::Index>(2 * i)] = diff.real();
      r[static_cast<Eigen::Index>(2 * i + 1)] = diff.imag();
    }
    return r;
  };
  out.fit = numerics::nlls_fit(pb);
  return out;
}

ResonatorParams to_params(const CoreFit& core) {
  const auto& p = core.fit.params;
  const Scaling& sc = core.scaling;
  ResonatorParams r;
  r.f0 = sc.f_ref + p[0] * sc.w_ref();
  r.q_total_inv = p[1] * sc.q_ref;
  r.q_ext_inv_mag = p[2] * sc.q_ref;
  r.phi = p[3];
  r.update_internal();
  const Eigen::MatrixXd& cov = core.fit.covariance;
  auto var = [&](int i) { return cov(i, i); };
  auto root = [](double v) { return std::isfinite(v) ? std::sqrt(std::max(v, 0.0)) : v; };
  r.sigmas.f0 = root(var(0)) * sc.w_ref();
  r.sigmas.q_total_inv = root(var(1)) * sc.q_ref;
  r.sigmas.q_ext_inv_mag = root(var(2)) * sc.q_ref;
  r.sigmas.phi = root(var(3));
  Eigen::Vector4d g(0.0, 1.0, -std::cos(p[3]), p[2] * std::sin(p[3]));
  r.sigmas.q_int_inv = root((g.transpose() * cov.topLeftCorner(4, 4) * g)(0, 0)) * sc.q_ref;
  return r;
}

ResonatorParams guess_from_sorted(const Sorted& d) {
  const std::size_t n = d.f.size();
  std::vector<double> p2(n);
  for (std::size_t i = 0; i < n; ++i) p2[i] = std::norm(d.s[i]);
  const auto imin = static_cast<std::size_t>(std::min_element(p2.begin(), p2.end()) - p2.begin());
  const double min_p2 = p2[imin];
  const double depth = 1.0 - min_p2;
  if (!(depth > 0.0)) throw NotFoundError("fit_s21: no transmission dip below unity");
  const double half = 0.5 * depth;
  auto crossing = [&](int step) -> double {
    for (long i = static_cast<long>(imin); i + step >= 0 && i + step < static_cast<long>(n); i += step) {
      const double a = 1.0 - p2[static_cast<std::size_t>(i)];
      const double b = 1.0 - p2[static_cast<std::size_t>(i + step)];
      if (b <= half) {
        const double t = (a - half) / (a - b);
        return d.f[static_cast<std::size_t>(i)] +
               t * (d.f[static_cast<std::size_t>(i + step)] - d.f[static_cast<std::size_t>(i)]);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  const double lo = crossing(-1), hi = crossing(+1);
  const double f0 = d.f[imin];
  double fwhm;
  if (std::isfinite(lo) && std::isfinite(hi)) fwhm = hi - lo;
  else if (std::isfinite(lo)) fwhm = 2.0 * (f0 - lo);
  else if (std::isfinite(hi)) fwhm = 2.0 * (hi - f0);
  else fwhm = (d.f.back() - d.f.front()) / 20.0;
  if (!(fwhm > 0.0)) fwhm = (d.f.back() - d.f.front()) / std::max<std::size_t>(n, 20);

  ResonatorParams r;
  r.f0 = f0;
  r.q_total_inv = fwhm / f0;
  const double a = 1.0 - std::sqrt(min_p2);
  r.q_ext_inv_mag = std::max(a, 1e-6) * r.q_total_inv;
  r.phi = 0.0;
  r.update_internal();
  return r;
}

}  // namespace

cplx Baseline::operator()(double f) const {
  const double x = (f - centre) / half_span;
  return (a0 + a1 * x) * std::polar(1.0, theta0 + theta1 * x);
}

double estimate_noise(const FrequencySweep& sweep, double edge_fraction) {
  const Sorted d = sorted_copy(sweep);
  return noise_from_edges(d, edge_count(d.f.size(), edge_fraction));
}

ResonatorParams initial_guess(const FrequencySweep& sweep) { return guess_from_sorted(sorted_copy(sweep)); }

Baseline estimate_baseline(const FrequencySweep& sweep, const NormalizeOptions& opts) {
  const Sorted d = sorted_copy(sweep);
  const std::size_t k = edge_count(d.f.size(), opts.edge_fraction);
  Baseline b = edge_baseline(d, k);
  if (!opts.joint_refinement) return b;

  Sorted norm = d;
  for (std::size_t i = 0; i < d.f.size(); ++i) norm.s[i] = d.s[i] / b(d.f[i]);
  const double noise = noise_from_edges(norm, k);
  double min_abs = std::numeric_limits<double>::infinity();
  for (const auto& s : norm.s) min_abs = std::min(min_abs, std::abs(s));
  const double depth = 1.0 - min_abs;
  if (!(depth > std::max(5.0 * noise, 1e-9))) return b;

  try {
    const ResonatorParams guess = guess_from_sorted(norm);
    const CoreFit first = fit_core(norm, guess, nullptr);
    const CoreFit joint = fit_core(d, to_params(first), &b);
    const auto& p = joint.fit.params;
    if (joint.fit.converged && p.allFinite() && p[4] > 0.0) {
      b.a0 = p[4];
      b.a1 = p[5];
      b.theta0 = p[6];
      b.theta1 = p[7];
      b.refined = true;
    }
  } catch (const Error&) {
    // keep the edge estimate
  }
  return b;
}

FrequencySweep normalize_sweep(const FrequencySweep& sweep, const NormalizeOptions& opts) {
  const Baseline b = estimate_baseline(sweep, opts);
  FrequencySweep out = sweep;
  for (std::size_t i = 0; i < out.size(); ++i) out.s21[i] = sweep.s21[i] / b(sweep.freqs[i]);
  return out;
}

S21Fit fit_s21(const FrequencySweep& sweep, const std::optional<ResonatorParams>& init) {
  const Sorted d = sorted_copy(sweep);
  const std::size_t n = d.f.size();
  if (n < 8) throw NotFoundError("fit_s21: need at least 8 points");
  const std::size_t k = std::max<std::size_t>(2, n / 10);
  const double noise = noise_from_edges(d, k);
  double min_abs = std::numeric_limits<double>::infinity();
  for (const auto& s : d.s) min_abs = std::min(min_abs, std::abs(s));
  const double depth = 1.0 - min_abs;
  if (!(depth > 5.0 * noise) || !(depth > 1e-12)) {
    std::ostringstream msg;
    msg << "fit_s21: no resonance dip detected (depth " << depth << " vs 5 x noise " << 5.0 * noise << ")";
    throw NotFoundError(msg.str());
  }

  const ResonatorParams start = init ? *init : guess_from_sorted(d);
  start.validate();
  const CoreFit core = fit_core(d, start, nullptr);
  if (!core.fit.converged) throw ConvergenceError("fit_s21: " + core.fit.message);

  S21Fit out;
  out.params = to_params(core);
  out.converged = core.fit.converged;
  out.iterations = core.fit.iterations;
  out.residual_rms = core.fit.residual_norm / std::sqrt(static_cast<double>(2 * n));
  out.noise_estimate = noise;
  out.message = core.fit.message;
  return out;
}

}  // namespace tlsloss::response
