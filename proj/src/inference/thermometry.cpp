#include "tlsloss/inference/thermometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tlsloss/error.hpp"
#include "tlsloss/numerics/roots.hpp"

namespace tlsloss::inference {

TemperatureModel::TemperatureModel(const tlsmodel::FilmParams& film, const tlsmodel::Device& dev,
                                   RelaxationCache& cache)
    : film_(film), dev_(dev), cache_(&cache) {
  film_.heat.reset();
}

double TemperatureModel::operator()(double n, double t) const {
  LossPoint pt;
  pt.n_bar = n;
  pt.t_bp = t;
  pt.f_sin = dev_.f_sin;
  pt.f0 = dev_.f0;
  return model_point(pt, film_, *cache_, false);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Temperature on [lo, hi] where the model reaches q_target (q(lo) <= q_target <= q(hi)).
double solve_t(const TemperatureModel& m, double n, double q_target, double lo, double hi, double tol) {
  numerics::RootOptions ro;
  ro.x_tol = tol;
  return numerics::find_root([&](double t) { return m(n, t) - q_target; }, lo, hi, ro);
}

double slope(const TemperatureModel& m, double n, double t) {
  const double h = 1e-4 * t;
  return (m(n, t + h) - m(n, t - h)) / (2.0 * h);
}

}  // namespace

TEffEstimate infer_effective_temperature(double q_measured, double n, const TemperatureModel& model,
                                         double t_bp, double sigma_q, const ThermometryOptions& opts) {
  if (!(t_bp > 0.0) || !(opts.t_hi > t_bp)) throw DomainError("infer_effective_temperature: need 0 < T_bp < t_hi");
  if (!std::isfinite(q_measured)) throw DomainError("infer_effective_temperature: q_measured is not finite");
  if (sigma_q < 0.0) throw DomainError("infer_effective_temperature: sigma_q must be >= 0");

  const double q_bp = model(n, t_bp);
  const double q_hi = model(n, opts.t_hi);
  // Restrict to the branch above the loss minimum (heating raises the loss).
  const double log_t_min = numerics::minimize_scalar(
      [&](double lt) { return model(n, std::exp(lt)); }, std::log(t_bp), std::log(opts.t_hi), 1e-8);
  const double t_lo = std::max(t_bp, std::exp(log_t_min));

  TEffEstimate est;
  if (q_measured <= q_bp + opts.detection_sigmas * sigma_q) {
    est.t_eff = t_bp;
    est.at_base = true;
    // One-sigma excursion above the base-plate loss, as a temperature.
    if (sigma_q > 0.0) {
      const double target = q_bp + sigma_q;
      est.sigma_t = target <= q_hi ? solve_t(model, n, target, t_lo, opts.t_hi, opts.t_tol) - t_bp
                                   : opts.t_hi - t_bp;
    }
    return est;
  }
  if (q_measured > q_hi) {
    std::ostringstream msg;
    msg << "infer_effective_temperature: q = " << q_measured << " at n = " << n
        << " exceeds the model range [" << q_bp << ", " << q_hi << "] on [" << t_bp << ", " << opts.t_hi << "] K";
    throw OutOfRangeError(msg.str(), q_bp, q_hi);
  }
  est.t_eff = solve_t(model, n, q_measured, t_lo, opts.t_hi, opts.t_tol);
  const double dq = slope(model, n, est.t_eff);
  est.sigma_t = dq != 0.0 ? sigma_q / std::abs(dq) : kNaN;
  return est;
}

SelfHeatingCurve infer_curve(const LossDataset& power, const tlsmodel::FilmParams& film, RelaxationCache& cache,
                             ThermometryMode mode, const std::map<std::string, tlsmodel::FilmParams>& per_device,
                             const ThermometryOptions& opts) {
  power.validate();
  SelfHeatingCurve curve;
  for (const auto& pt : power.points) {
    const tlsmodel::FilmParams* f = &film;
    if (mode == ThermometryMode::per_device) {
      auto it = per_device.find(pt.device_id);
      if (it == per_device.end())
        throw SchemaError("device_id", "no per-device film for '" + pt.device_id + "'");
      f = &it->second;
    }
    tlsmodel::Device dev;
    dev.id = pt.device_id;
    dev.f0 = pt.f0;
    dev.f_sin = pt.f_sin;
    const TemperatureModel model(*f, dev, cache);

    SelfHeatingPoint sp;
    sp.n_bar = pt.n_bar;
    sp.t_bp = pt.t_bp;
    sp.device_id = pt.device_id;
    try {
      const auto est = infer_effective_temperature(pt.q_int_inv, pt.n_bar, model, pt.t_bp, pt.sigma, opts);
      sp.t_eff = est.t_eff;
      sp.sigma_t = est.sigma_t;
      sp.at_base = est.at_base;
    } catch (const OutOfRangeError& e) {
      sp.t_eff = kNaN;
      sp.sigma_t = kNaN;
      sp.out_of_range = true;
      sp.message = e.what();
    }
    curve.points.push_back(sp);
  }
  return curve;
}

SelfHeatingFit fit_self_heating(const std::vector<SelfHeatingCurve>& curves, const SelfHeatingOptions& opts) {
  if (!(opts.beta > 0.0 && opts.beta < 2.0)) throw DomainError("fit_self_heating: beta must lie in (0, 2)");
  std::vector<const SelfHeatingPoint*> use;
  for (const auto& c : curves)
    for (const auto& p : c.points) {
      if (p.out_of_range || !std::isfinite(p.t_eff)) continue;
      if (p.at_base && !opts.include_at_base) continue;
      if (!(p.sigma_t > 0.0) || !std::isfinite(p.sigma_t) || !(p.n_bar > 0.0)) continue;
      use.push_back(&p);
    }

  SelfHeatingFit out;
  out.law.beta = opts.beta;
  out.points_used = static_cast<int>(use.size());
  if (use.empty()) {
    out.law.a_coeff = 0.0;
    out.low_confidence = true;
    out.sigma_a = kNaN;
    out.message = "no points with detectable heating: A reported as 0";
    return out;
  }

  double n_lo = use.front()->n_bar, n_hi = n_lo;
  std::vector<double> tbps;
  for (auto* p : use) {
    n_lo = std::min(n_lo, p->n_bar);
    n_hi = std::max(n_hi, p->n_bar);
    tbps.push_back(p->t_bp);
  }
  std::sort(tbps.begin(), tbps.end());
  out.law.t_bp = tbps[tbps.size() / 2];

  const auto n_res = static_cast<Eigen::Index>(use.size());
  numerics::FitProblem prob;
  prob.residuals = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(n_res);
    for (Eigen::Index i = 0; i < n_res; ++i) {
      const auto* p = use[static_cast<std::size_t>(i)];
      r[i] = (p->t_eff - p->t_bp - 1e-3 * x[0] * std::pow(p->n_bar, x[1])) / p->sigma_t;
    }
    return r;
  };
  // Linear start for A at the starting beta.
  double sxy = 0.0, sxx = 0.0;
  for (auto* p : use) {
    const double x = std::pow(p->n_bar, opts.beta), w = 1.0 / (p->sigma_t * p->sigma_t);
    sxy += w * x * (p->t_eff - p->t_bp);
    sxx += w * x * x;
  }
  prob.initial = Eigen::Vector2d(std::max(1e3 * sxy / sxx, 0.0), opts.beta);
  prob.lower = Eigen::Vector2d(0.0, 0.01);
  prob.upper = Eigen::Vector2d(std::numeric_limits<double>::infinity(), 1.99);
  prob.frozen = {false, !opts.free_beta};
  out.fit = numerics::nlls_fit(prob);
  out.law.a_coeff = 1e-3 * out.fit.params[0];
  out.law.beta = out.fit.params[1];
  const auto s = out.fit.sigmas();
  out.sigma_a = 1e-3 * s[0];
  out.sigma_beta = s[1];

  const double decades = std::log10(n_hi / n_lo);
  std::ostringstream msg;
  if (use.size() < 2 || decades < opts.min_decades) {
    out.low_confidence = true;
    msg << "n_bar span of " << decades << " decades over " << use.size() << " points is below "
        << opts.min_decades << " decades; ";
  }
  if (out.fit.degenerate) out.low_confidence = true;
  msg << out.fit.message;
  out.message = msg.str();

  // Per-device amplitudes at the joint beta (weighted linear least squares).
  std::map<std::string, std::pair<double, double>> acc;
  for (auto* p : use) {
    const double x = std::pow(p->n_bar, out.law.beta), w = 1.0 / (p->sigma_t * p->sigma_t);
    auto& [num, den] = acc[p->device_id];
    num += w * x * (p->t_eff - p->t_bp);
    den += w * x * x;
  }
  for (const auto& [id, nd] : acc) out.per_device_a[id] = nd.first / nd.second;
  return out;
}

}  // namespace tlsloss::inference
