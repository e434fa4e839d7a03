#include "tlsloss/inference/detuning.hpp"

#include <cmath>
#include <sstream>

#include "tlsloss/error.hpp"
#include "tlsloss/numerics/roots.hpp"

namespace tlsloss::inference {

double DetuningModel::t_eff(double n) const {
  return film.heat && film.terms.self_heating ? t_bp + film.heat->heating(n) : t_bp;
}

double DetuningModel::resonance(double n) const {
  const double t = t_eff(n);
  if (t == t_bp) return dev.f0;
  return dev.f0 * (1.0 + film.shift(dev, t) - film.shift(dev, t_bp));
}

response::ResonatorParams DetuningModel::resonator(double n) const {
  if (!cache) throw DomainError("DetuningModel: relaxation cache not set");
  LossPoint pt;
  pt.n_bar = n;
  pt.t_bp = t_bp;
  pt.f_sin = dev.f_sin;
  pt.f0 = dev.f0;
  const double qi = model_point(pt, film, *cache, true);
  if (!std::isfinite(qi))
    throw OutOfRangeError("DetuningModel: effective temperature outside the model range", t_bp, t_eff(n));
  return response::make_resonator(resonance(n), qi, dev.q_ext_inv, dev.phi);
}

double DetuningModel::photon_number_at(double f_drive, double p_inc) const {
  if (p_inc < 0.0) throw DomainError("photon_number_at: power must be >= 0");
  if (p_inc == 0.0) return 0.0;
  // g(n) = n - N(n) rises with n: more photons, more loss, fewer photons.
  // Beyond the model's temperature range the loss is taken as unbounded.
  auto g = [&](double n) {
    try {
      const auto r = resonator(n);
      return n - response::photon_number(r, p_inc, f_drive - r.f0);
    } catch (const OutOfRangeError&) {
      return n;
    }
  };
  double lo = 0.0, hi = std::max(1.0, -g(0.0));
  for (int i = 0; g(hi) < 0.0; ++i) {
    if (i > 80) throw ConvergenceError("photon_number_at: could not bracket the photon number");
    lo = hi;
    hi *= 4.0;
  }
  numerics::RootOptions ro;
  ro.x_tol = 1e-12 * hi;
  return numerics::find_root(g, lo, hi, ro);
}

DetuningResult converge_detuning(double target_detuning, double drive_power, const DetuningModel& model,
                                 const DetuningOptions& opts) {
  if (target_detuning == 0.0 || !std::isfinite(target_detuning))
    throw DomainError("converge_detuning: target detuning must be finite and non-zero");
  if (!(drive_power > 0.0)) throw DomainError("converge_detuning: drive power must be > 0");
  if (opts.max_iterations < 1) throw DomainError("converge_detuning: need at least one iteration");

  DetuningResult res;
  double assumed = model.dev.f0 + opts.initial_f0_error;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const double f_drive = assumed + target_detuning;
    const double n = model.photon_number_at(f_drive, drive_power);
    const double f_res = model.resonance(n);
    const double mismatch = (f_drive - f_res) - target_detuning;
    res.mismatch_history.push_back(mismatch);
    if (it == 1) res.first_mismatch = mismatch;
    res.drive_freq = f_drive;
    res.n_bar = n;
    res.resonance = f_res;
    res.detuning = f_drive - f_res;
    res.t_eff = model.t_eff(n);
    res.iterations = it;
    if (std::abs(mismatch) < opts.rel_tol * std::abs(target_detuning)) return res;
    assumed = f_res;
  }
  const auto& h = res.mismatch_history;
  std::ostringstream msg;
  msg.precision(12);
  msg << "converge_detuning: no convergence after " << opts.max_iterations
      << " iterations (possible bistability); last two detuning mismatches "
      << (h.size() > 1 ? h[h.size() - 2] : h.back()) << " Hz and " << h.back() << " Hz";
  throw ConvergenceError(msg.str());
}

}  // namespace tlsloss::inference
