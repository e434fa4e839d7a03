#include "tlsloss/inference/loss_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "tlsloss/error.hpp"
#include "tlsloss/tlsmodel/loss.hpp"

namespace tlsloss::inference {

using tlsmodel::FilmParams;
using tlsmodel::RelaxationTable;

void LossDataset::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const std::string row = " (row " + std::to_string(i) + ")";
    if (!(p.n_bar >= 0.0) || !std::isfinite(p.n_bar)) throw SchemaError("n_bar", "must be finite and >= 0" + row);
    if (!(p.t_bp > 0.0) || !std::isfinite(p.t_bp)) throw SchemaError("t_bp_kelvin", "must be finite and > 0" + row);
    if (!std::isfinite(p.q_int_inv)) throw SchemaError("qi_inv", "must be finite" + row);
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) throw SchemaError("qi_inv_sigma", "must be finite and > 0" + row);
    if (p.device_id.empty()) throw SchemaError("device_id", "must not be empty" + row);
    if (!(p.f_sin >= 0.0 && p.f_sin <= 1.0)) throw SchemaError("f_sin", "must lie in [0, 1]" + row);
    if (!(p.f0 > 0.0) || !std::isfinite(p.f0)) throw SchemaError("f0_hz", "must be finite and > 0" + row);
  }
}

const RelaxationTable& RelaxationCache::get(double f0) {
  auto it = tables_.find(f0);
  if (it == tables_.end())
    it = tables_.emplace(f0, std::make_shared<const RelaxationTable>(f0, kernel_)).first;
  return *it->second;
}

void RelaxationCache::prefetch(const std::vector<double>& f0s, int jobs) {
  std::vector<double> missing;
  for (double f : std::set<double>(f0s.begin(), f0s.end()))
    if (!tables_.count(f)) missing.push_back(f);
  if (missing.empty()) return;
  std::vector<std::shared_ptr<const RelaxationTable>> built(missing.size());
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(missing.size(), jobs > 0 ? jobs : hw);
  std::vector<std::thread> pool;
  std::mutex error_mutex;
  std::exception_ptr error;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < missing.size(); i += workers) {
        try {
          built[i] = std::make_shared<const RelaxationTable>(missing[i], kernel_);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  for (std::size_t i = 0; i < missing.size(); ++i) tables_.emplace(missing[i], built[i]);
}

const char* loss_param_name(int i) {
  static const char* names[] = {"tan_res", "n_c", "tan_rel", "q_bg_inv", "heat_a", "heat_beta"};
  if (i < 0 || i >= kLossParamCount) throw DomainError("loss_param_name: index out of range");
  return names[i];
}

double model_point(const LossPoint& pt, const FilmParams& film, RelaxationCache& cache, bool with_heat) {
  const auto& terms = film.terms;
  double t = pt.t_bp;
  if (with_heat && terms.self_heating && film.heat) t += film.heat->heating(pt.n_bar);
  double q = terms.background ? film.q_bg_inv : 0.0;
  if (terms.resonant && film.tan_res != 0.0) {
    tlsmodel::TlsParams p;
    p.f_tan_res = pt.f_sin * film.tan_res;
    p.n_c = film.n_c;
    q += tlsmodel::q_res_inv(pt.n_bar, t, pt.f0, p);
  }
  if (terms.relaxation && film.tan_rel != 0.0) {
    const auto& table = cache.get(pt.f0);
    if (t > table.t_max()) return std::numeric_limits<double>::quiet_NaN();
    q += pt.f_sin * film.tan_rel * table.normalized(t, film.t0);
  }
  if (terms.quasiparticle && film.qp.alpha_kin > 0.0) {
    if (!(t < 0.5 * film.qp.tc)) return std::numeric_limits<double>::quiet_NaN();
    auto qp = film.qp;
    qp.f0 = pt.f0;
    q += tlsmodel::q_qp_inv(t, qp);
  }
  return q;
}

namespace {

// Fit-space scaling: parameters are O(1) in the fitter.
constexpr double kTanScale = 1e-3;
constexpr double kBgScale = 1e-6;
constexpr double kHeatScale = 1e-3;

Eigen::VectorXd to_fit_space(const FilmParams& f) {
  Eigen::VectorXd x(kLossParamCount);
  x[kTanRes] = f.tan_res / kTanScale;
  x[kNc] = std::log10(f.n_c);
  x[kTanRel] = f.tan_rel / kTanScale;
  x[kQbg] = f.q_bg_inv / kBgScale;
  x[kHeatA] = f.heat ? f.heat->a_coeff / kHeatScale : 0.0;
  x[kHeatBeta] = f.heat ? f.heat->beta : 0.5;
  return x;
}

void from_fit_space(const Eigen::VectorXd& x, FilmParams& f, bool heat) {
  f.tan_res = x[kTanRes] * kTanScale;
  f.n_c = std::pow(10.0, x[kNc]);
  f.tan_rel = x[kTanRel] * kTanScale;
  f.q_bg_inv = x[kQbg] * kBgScale;
  if (heat) {
    tlsmodel::SelfHeatingLaw law;
    law.a_coeff = x[kHeatA] * kHeatScale;
    law.beta = x[kHeatBeta];
    f.heat = law;
  } else {
    f.heat.reset();
  }
}

double physical_sigma(int i, double x, double sx) {
  switch (i) {
    case kTanRes:
    case kTanRel: return sx * kTanScale;
    case kNc: return std::pow(10.0, x) * std::log(10.0) * sx;
    case kQbg: return sx * kBgScale;
    case kHeatA: return sx * kHeatScale;
    default: return sx;
  }
}

int param_index(const std::string& name) {
  for (int i = 0; i < kLossParamCount; ++i)
    if (name == loss_param_name(i)) return i;
  throw SchemaError("frozen", "unknown parameter '" + name + "'");
}

double to_fit_value(int i, double v) {
  switch (i) {
    case kTanRes:
    case kTanRel: return v / kTanScale;
    case kNc:
      if (!(v > 0.0)) throw SchemaError("frozen.n_c", "must be > 0");
      return std::log10(v);
    case kQbg: return v / kBgScale;
    case kHeatA: return v / kHeatScale;
    default: return v;
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Data-driven starting point for the loss tangents and the background.
FilmParams heuristic_start(const std::vector<const LossPoint*>& pts, const FilmParams& base,
                           RelaxationCache& cache) {
  FilmParams f = base;
  double qmin = std::numeric_limits<double>::infinity();
  for (auto* p : pts) qmin = std::min(qmin, p->q_int_inv);
  f.q_bg_inv = f.terms.background ? std::max(0.0, 0.5 * qmin) : 0.0;

  std::map<std::string, double> lowest_n;
  for (auto* p : pts)
    if (p->t_bp < 0.05) {
      auto [it, fresh] = lowest_n.emplace(p->device_id, p->n_bar);
      if (!fresh) it->second = std::min(it->second, p->n_bar);
    }
  std::vector<double> res_est;
  for (auto* p : pts) {
    auto it = lowest_n.find(p->device_id);
    if (it != lowest_n.end() && p->n_bar == it->second && p->t_bp < 0.05 && p->f_sin > 0.0)
      res_est.push_back((p->q_int_inv - f.q_bg_inv) / p->f_sin);
  }
  const double tr = median(res_est);
  f.tan_res = f.terms.resonant && std::isfinite(tr) && tr > 0.0 ? tr : 1e-4;

  std::vector<double> rel_est;
  for (auto* p : pts)
    if (p->t_bp > 0.3 && p->f_sin > 0.0 && f.terms.relaxation) {
      FilmParams no_rel = f;
      no_rel.tan_rel = 0.0;
      no_rel.heat.reset();
      const double excess = p->q_int_inv - model_point(*p, no_rel, cache, false);
      const double g = cache.get(p->f0).normalized(p->t_bp, f.t0);
      rel_est.push_back(excess / (p->f_sin * g));
    }
  const double trl = median(rel_est);
  f.tan_rel = f.terms.relaxation ? (std::isfinite(trl) ? std::max(trl, 1e-7) : 1e-5) : 0.0;
  return f;
}

}  // namespace

LossFitResult fit_loss_model(const LossDataset& power, const LossDataset& temp,
                             const LossFitConfig& config, RelaxationCache* cache_in) {
  power.validate();
  temp.validate();
  if (power.empty() && temp.empty()) throw DomainError("fit_loss_model: both datasets are empty");

  const auto kernel = config.kernel.value_or(tlsmodel::RelaxKernelParams::defaults(config.d));
  if (kernel.d != config.d) throw DomainError("fit_loss_model: kernel dimensionality differs from config.d");
  std::optional<RelaxationCache> own_cache;
  if (!cache_in) own_cache.emplace(kernel);
  RelaxationCache& cache = cache_in ? *cache_in : *own_cache;
  if (cache.kernel().d != kernel.d || cache.kernel().rho_d != kernel.rho_d ||
      cache.kernel().gamma_bar != kernel.gamma_bar || cache.kernel().v_bar != kernel.v_bar)
    throw DomainError("fit_loss_model: relaxation cache was built for a different kernel");

  std::vector<const LossPoint*> pts;
  for (const auto& p : power.points) pts.push_back(&p);
  for (const auto& p : temp.points) pts.push_back(&p);

  LossFitResult out;
  const auto& terms = config.terms;
  const bool fit_heat = terms.self_heating;

  if (terms.relaxation) {
    std::vector<double> f0s;
    for (auto* p : pts) f0s.push_back(p->f0);
    cache.prefetch(f0s, config.jobs);
    if (temp.empty())
      out.warnings.push_back("relaxation enabled but no temperature sweep supplied: tan_rel is poorly identified");
  }

  FilmParams base;
  base.t0 = config.t0;
  base.kernel = kernel;
  base.qp = config.qp;
  base.terms = terms;
  base.n_c = 20.0;
  if (fit_heat) base.heat = tlsmodel::SelfHeatingLaw{1e-4, 0.5, 0.01};

  std::vector<bool> frozen(kLossParamCount, false);
  Eigen::VectorXd frozen_value = Eigen::VectorXd::Zero(kLossParamCount);
  auto freeze = [&](int i, double fit_value) {
    frozen[i] = true;
    frozen_value[i] = fit_value;
  };
  if (!terms.resonant) {
    freeze(kTanRes, 0.0);
    freeze(kNc, std::log10(base.n_c));
  }
  if (!terms.relaxation) freeze(kTanRel, 0.0);
  if (!terms.background) freeze(kQbg, 0.0);
  if (!fit_heat) {
    freeze(kHeatA, 0.0);
    freeze(kHeatBeta, 0.5);
  } else if (!config.free_beta) {
    freeze(kHeatBeta, 0.5);
  }
  for (const auto& [name, value] : config.frozen) freeze(param_index(name), to_fit_value(param_index(name), value));

  bool has_hot_point = false;
  for (auto* p : pts) has_hot_point |= p->t_bp > 0.3;
  if (terms.relaxation && !frozen[kTanRel] && !has_hot_point) {
    out.degenerate = true;
    out.warnings.push_back("relaxation enabled but no data above 0.3 K: tan_rel is not identifiable");
  }

  const double ridge = std::sqrt(std::max(config.relaxation_ridge, 0.0));
  const bool add_ridge = !frozen[kTanRel] && ridge > 0.0;
  const Eigen::Index n_res = static_cast<Eigen::Index>(pts.size()) + (add_ridge ? 1 : 0);

  auto residuals = [&](const Eigen::VectorXd& x) {
    FilmParams f = base;
    from_fit_space(x, f, fit_heat);
    Eigen::VectorXd r(n_res);
    for (std::size_t i = 0; i < pts.size(); ++i)
      r[static_cast<Eigen::Index>(i)] = (pts[i]->q_int_inv - model_point(*pts[i], f, cache)) / pts[i]->sigma;
    if (add_ridge) r[n_res - 1] = ridge * x[kTanRel];
    return r;
  };

  Eigen::VectorXd lower(kLossParamCount), upper(kLossParamCount);
  const double inf = std::numeric_limits<double>::infinity();
  lower << 0.0, -3.0, -inf, 0.0, 0.0, 0.05;
  upper << inf, 10.0, inf, inf, inf, 1.95;

  // Starting points: the heuristic (or supplied) film, tried over a small grid
  // of n_c and heating amplitudes; the lowest chi^2 wins, first one on ties.
  const FilmParams start = config.initial ? *config.initial : heuristic_start(pts, base, cache);
  Eigen::VectorXd x0 = to_fit_space(start);
  if (fit_heat && !start.heat) {
    x0[kHeatA] = 0.1;
    x0[kHeatBeta] = 0.5;
  }
  auto run_starts = [&](const std::vector<bool>& fixed, const Eigen::VectorXd& fixed_value) {
    std::vector<Eigen::VectorXd> starts;
    if (config.initial) {
      starts.push_back(x0);
    } else {
      const bool vary_heat = fit_heat && !fixed[kHeatA];
      for (double lnc : {0.0, 2.0, 4.0})
        for (double a : vary_heat ? std::vector<double>{0.1, 1.0} : std::vector<double>{0.0}) {
          Eigen::VectorXd s = x0;
          s[kNc] = lnc;
          s[kHeatA] = a;
          starts.push_back(s);
        }
    }
    numerics::FitResult best;
    bool have_best = false;
    for (auto s : starts) {
      for (int i = 0; i < kLossParamCount; ++i) {
        if (fixed[i]) s[i] = fixed_value[i];
        s[i] = std::clamp(s[i], lower[i], upper[i]);
      }
      numerics::FitProblem prob;
      prob.residuals = residuals;
      prob.initial = s;
      prob.lower = lower;
      prob.upper = upper;
      prob.frozen = fixed;
      prob.options.max_iterations = 300;
      numerics::FitResult fr;
      try {
        fr = numerics::nlls_fit(prob);
      } catch (const Error&) {
        continue;  // non-finite model at this start
      }
      if (!have_best || fr.chi2 < best.chi2) {
        best = std::move(fr);
        have_best = true;
      }
    }
    if (!have_best) throw ConvergenceError("fit_loss_model: no starting point gave a finite model");
    return best;
  };

  numerics::FitResult best = run_starts(frozen, frozen_value);

  // Self-heating significance: refit with the heating amplitude at zero and
  // keep the heated model only if it lowers chi^2 beyond the gate. Without a
  // high-power rise the amplitude is unidentified and trades off against the
  // relaxation term on noise alone.
  if (fit_heat && !frozen[kHeatA] && config.heat_gate_sigmas > 0.0) {
    std::vector<bool> nested_frozen = frozen;
    Eigen::VectorXd nested_value = frozen_value;
    nested_frozen[kHeatA] = nested_frozen[kHeatBeta] = true;
    nested_value[kHeatA] = 0.0;
    nested_value[kHeatBeta] = frozen[kHeatBeta] ? frozen_value[kHeatBeta] : 0.5;
    const int extra = frozen[kHeatBeta] ? 1 : 2;
    // chi^2 quantile with the two-sided Gaussian tail probability of the gate
    const double s = config.heat_gate_sigmas;
    const double threshold = extra == 1 ? s * s : -2.0 * std::log(std::erfc(s / std::sqrt(2.0)));
    numerics::FitResult nested = run_starts(nested_frozen, nested_value);
    out.heat_delta_chi2 = nested.chi2 - best.chi2;
    if (out.heat_delta_chi2 < threshold) {
      best = std::move(nested);
      frozen = nested_frozen;
      out.heat_significant = false;
      std::ostringstream msg;
      msg << "self-heating not significant (delta chi^2 = " << out.heat_delta_chi2 << " < " << threshold
          << "): amplitude set to zero";
      out.warnings.push_back(msg.str());
    }
  }

  out.fit = best;
  out.film = base;
  from_fit_space(best.params, out.film, fit_heat);
  out.chi2_dof = best.dof > 0 ? best.chi2 / best.dof : std::numeric_limits<double>::quiet_NaN();
  if (best.degenerate) {
    out.degenerate = true;
    out.warnings.push_back("normal equations are rank-deficient at the solution: " + best.message);
  }
  if (!best.converged) out.warnings.push_back("fit did not converge: " + best.message);

  const Eigen::VectorXd sx = best.sigmas();
  for (int i = 0; i < kLossParamCount; ++i) {
    out.fitted[i] = !frozen[i];
    out.sigmas[i] = frozen[i] ? 0.0 : physical_sigma(i, best.params[i], sx[i]);
  }
  out.residuals.assign(best.residuals.data(), best.residuals.data() + pts.size());
  return out;
}

}  // namespace tlsloss::inference
