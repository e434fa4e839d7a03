#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tlsloss/cli/presets.hpp"
#include "tlsloss/error.hpp"
#include "tlsloss/inference/detuning.hpp"
#include "tlsloss/inference/loss_fit.hpp"
#include "tlsloss/inference/synthetic.hpp"
#include "tlsloss/inference/thermometry.hpp"
#include "tlsloss/response/resonator.hpp"

using namespace tlsloss;
using namespace tlsloss::inference;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct Bundle {
  cli::Preset preset;
  LossDataset power, temp;
};

RelaxationCache& shared_cache() {
  static RelaxationCache cache(tlsmodel::RelaxKernelParams::defaults(2));
  return cache;
}

Bundle make_bundle(const std::string& name, bool noiseless = false, std::uint64_t seed_offset = 0) {
  Bundle b{cli::preset_by_name(name), {}, {}};
  auto pn = b.preset.power_noise, tn = b.preset.temp_noise;
  pn.seed += seed_offset;
  tn.seed += seed_offset;
  if (noiseless) pn = tn = {0.0, 0.0, 0};
  auto& c = shared_cache();
  b.power = synth_power_sweep(b.preset.film, b.preset.devices, b.preset.power_n_grid, b.preset.t_bp, pn, c);
  b.temp = synth_temperature_sweep(b.preset.film, b.preset.devices, b.preset.temp_grid, b.preset.temp_n_bar, tn, c);
  return b;
}

const tlsmodel::Device& device_a(const cli::Preset& p) { return p.devices.front(); }

}  // namespace

TEST_SUITE("fit_loss_model") {
  TEST_CASE("zero-noise as-deposited bundle is recovered exactly") {
    const auto b = make_bundle("as-deposited", true);
    const auto r = fit_loss_model(b.power, b.temp, {}, &shared_cache());
    CHECK(r.fit.converged);
    CHECK_FALSE(r.degenerate);
    CHECK(rel(r.film.tan_res, 1.4e-3) < 1e-6);
    CHECK(rel(r.film.n_c, 20.0) < 1e-6);
    CHECK(rel(r.film.tan_rel, 3.4e-3) < 1e-6);
    CHECK(rel(r.film.q_bg_inv, 1e-6) < 1e-6);
    REQUIRE(r.film.heat);
    CHECK(rel(r.film.heat->a_coeff, 7e-4) < 1e-6);
    CHECK(r.film.heat->beta == 0.5);
    CHECK_FALSE(r.fitted[kHeatBeta]);
  }

  TEST_CASE("as-deposited bundle at 1% noise within 5%, errors consistent with sigma") {
    const auto b = make_bundle("as-deposited");
    const auto r = fit_loss_model(b.power, b.temp, {}, &shared_cache());
    CHECK(rel(r.film.tan_res, 1.4e-3) < 0.05);
    CHECK(rel(r.film.tan_rel, 3.4e-3) < 0.05);
    CHECK(std::abs(r.film.tan_res - 1.4e-3) < 5.0 * r.sigmas[kTanRes]);
    CHECK(std::abs(r.film.tan_rel - 3.4e-3) < 5.0 * r.sigmas[kTanRel]);
    CHECK(r.chi2_dof == doctest::Approx(1.0).epsilon(0.3));
    CHECK(r.residuals.size() == b.power.points.size() + b.temp.points.size());
  }

  TEST_CASE("annealed bundle: relaxation amplitude consistent with zero") {
    const auto b = make_bundle("annealed");
    const auto r = fit_loss_model(b.power, b.temp, {}, &shared_cache());
    CHECK(rel(r.film.tan_res, 4.8e-4) < 0.05);
    CHECK(r.sigmas[kTanRel] > 0.0);
    CHECK(std::abs(r.film.tan_rel) < 2.0 * r.sigmas[kTanRel]);
  }

  TEST_CASE("invariant under point order and device relabeling") {
    const auto b = make_bundle("as-deposited");
    const auto ref = fit_loss_model(b.power, b.temp, {}, &shared_cache());

    auto shuffled_p = b.power, shuffled_t = b.temp;
    std::mt19937_64 rng(5);
    std::shuffle(shuffled_p.points.begin(), shuffled_p.points.end(), rng);
    std::shuffle(shuffled_t.points.begin(), shuffled_t.points.end(), rng);
    for (auto& pt : shuffled_p.points) pt.device_id = "dev-" + pt.device_id;
    for (auto& pt : shuffled_t.points) pt.device_id = "dev-" + pt.device_id;
    const auto r = fit_loss_model(shuffled_p, shuffled_t, {}, &shared_cache());
    CHECK(rel(r.film.tan_res, ref.film.tan_res) < 1e-6);
    CHECK(rel(r.film.tan_rel, ref.film.tan_rel) < 1e-6);
    CHECK(rel(r.film.n_c, ref.film.n_c) < 1e-6);
    CHECK(rel(r.film.heat->a_coeff, ref.film.heat->a_coeff) < 1e-6);
  }

  TEST_CASE("relaxation without data above 0.3 K is flagged degenerate") {
    auto b = make_bundle("as-deposited");
    std::erase_if(b.temp.points, [](const LossPoint& p) { return p.t_bp > 0.3; });
    const auto r = fit_loss_model(b.power, b.temp, {}, &shared_cache());
    CHECK(r.degenerate);
    CHECK_FALSE(r.warnings.empty());
  }

  TEST_CASE("missing temperature sweep produces an identifiability warning") {
    const auto b = make_bundle("annealed");
    const auto r = fit_loss_model(b.power, LossDataset{{}, SweepKind::temperature}, {}, &shared_cache());
    CHECK(r.degenerate);
    CHECK(r.warnings.size() >= 2);
  }

  TEST_CASE("disabled relaxation and frozen parameters") {
    const auto b = make_bundle("annealed");
    LossFitConfig cfg;
    cfg.terms.relaxation = false;
    cfg.frozen["q_bg_inv"] = 1e-6;
    const auto r = fit_loss_model(b.power, b.temp, cfg, &shared_cache());
    CHECK_FALSE(r.fitted[kTanRel]);
    CHECK_FALSE(r.fitted[kQbg]);
    CHECK(r.film.tan_rel == 0.0);
    CHECK(r.film.q_bg_inv == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(r.sigmas[kTanRel] == 0.0);
    CHECK(rel(r.film.tan_res, 4.8e-4) < 0.05);
    CHECK_THROWS_AS(([&] {
                      LossFitConfig bad;
                      bad.frozen["nope"] = 1.0;
                      fit_loss_model(b.power, b.temp, bad, &shared_cache());
                    }()),
                    SchemaError);
  }

  TEST_CASE("schema errors name the field") {
    LossDataset ds;
    ds.points.push_back({1.0, 0.01, 1e-5, -1.0, "A", 0.1, 6e9});
    try {
      ds.validate();
      FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
      CHECK(e.field == "qi_inv_sigma");
    }
  }
}

TEST_SUITE("infer_effective_temperature") {
  const auto preset = cli::as_deposited_preset();
  const TemperatureModel model(preset.film, device_a(preset), shared_cache());

  TEST_CASE("base-plate loss maps to the base-plate temperature") {
    const double q = model(1e3, 0.01);
    const auto est = infer_effective_temperature(q, 1e3, model, 0.01);
    CHECK(est.t_eff == 0.01);
    CHECK(est.at_base);
    CHECK(infer_effective_temperature(0.5 * q, 1e3, model, 0.01).t_eff == 0.01);
  }

  TEST_CASE("round trip at 1.3 K") {
    const double q = model(1e3, 1.3);
    CHECK(std::abs(infer_effective_temperature(q, 1e3, model, 0.01).t_eff - 1.3) < 1e-6);
  }

  TEST_CASE("relaxation branch is selected when the model is non-monotone") {
    // At one photon the resonant term makes q(T) fall before it rises.
    CHECK(model(1.0, 0.15) < model(1.0, 0.01));
    const double q = model(1.0, 0.8);
    CHECK(std::abs(infer_effective_temperature(q, 1.0, model, 0.01).t_eff - 0.8) < 1e-6);
  }

  TEST_CASE("identity on [T_bp, 2 K]") {
    for (double n : {1.0, 1e4, 1e6})
      for (double t : inference::log_grid(0.3, 2.0, 12)) {
        const auto est = infer_effective_temperature(model(n, t), n, model, 0.01);
        CHECK(std::abs(est.t_eff - t) < 1e-6);
      }
  }

  TEST_CASE("as-deposited at 1e7 photons exceeds 2 K") {
    LossPoint pt{1e7, 0.01, 0.0, 1.0, "A", device_a(preset).f_sin, device_a(preset).f0};
    const double q = model_point(pt, preset.film, shared_cache(), true);
    const auto est = infer_effective_temperature(q, 1e7, model, 0.01, 0.01 * q);
    CHECK(est.t_eff > 2.0);
    CHECK(est.sigma_t > 0.0);
  }

  TEST_CASE("unreachable loss carries the model range") {
    try {
      infer_effective_temperature(1.0, 1e3, model, 0.01);
      FAIL("expected OutOfRangeError");
    } catch (const OutOfRangeError& e) {
      CHECK(e.lower == doctest::Approx(model(1e3, 0.01)));
      CHECK(e.upper == doctest::Approx(model(1e3, 4.0)));
    }
  }
}

TEST_SUITE("fit_self_heating") {
  SelfHeatingCurve exact_curve(const std::string& id, double a, double beta, double t_bp) {
    SelfHeatingCurve c;
    for (double n : inference::log_grid(1e2, 1e7, 21))
      c.points.push_back({n, t_bp + a * std::pow(n, beta), 1e-3, t_bp, id});
    return c;
  }

  TEST_CASE("exact data with beta frozen") {
    const auto fit = fit_self_heating({exact_curve("A", 7e-4, 0.5, 0.02)});
    CHECK(fit.law.a_coeff == doctest::Approx(7e-4).epsilon(1e-12));
    CHECK(fit.law.beta == 0.5);
    CHECK_FALSE(fit.low_confidence);
    CHECK(fit.per_device_a.at("A") == doctest::Approx(7e-4).epsilon(1e-12));
  }

  TEST_CASE("beta free on exact beta = 0.5 data") {
    SelfHeatingOptions opts;
    opts.free_beta = true;
    opts.beta = 0.4;
    const auto fit = fit_self_heating({exact_curve("A", 7e-4, 0.5, 0.02)}, opts);
    CHECK(std::abs(fit.law.beta - 0.5) < 1e-6);
    CHECK(rel(fit.law.a_coeff, 7e-4) < 1e-5);
  }

  TEST_CASE("two devices, same law, different noise: shared A within 2%") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<SelfHeatingCurve> curves;
    for (auto [id, sigma] : {std::pair{"A", 5e-3}, std::pair{"B", 2e-2}}) {
      auto c = exact_curve(id, 7e-4, 0.5, 0.01);
      for (auto& p : c.points) {
        p.sigma_t = sigma;
        p.t_eff += sigma * g(rng);
      }
      curves.push_back(c);
    }
    const auto fit = fit_self_heating(curves);
    CHECK(rel(fit.law.a_coeff, 7e-4) < 0.02);
    CHECK(fit.per_device_a.size() == 2);
    // Merging datasets obeying the same law leaves A unchanged within sigma.
    const auto only_a = fit_self_heating({curves[0]});
    CHECK(std::abs(only_a.law.a_coeff - fit.law.a_coeff) < only_a.sigma_a);
  }

  TEST_CASE("narrow span is low confidence; no heated points gives A = 0") {
    SelfHeatingCurve c;
    for (double n : {1e4, 2e4, 5e4}) c.points.push_back({n, 0.01 + 7e-4 * std::sqrt(n), 1e-3, 0.01, "A"});
    CHECK(fit_self_heating({c}).low_confidence);
    for (auto& p : c.points) p.at_base = true;
    const auto none = fit_self_heating({c});
    CHECK(none.law.a_coeff == 0.0);
    CHECK(none.low_confidence);
    CHECK(none.points_used == 0);
  }

  TEST_CASE("forward-generate, invert, refit recovers A within 2%") {
    const auto b = make_bundle("as-deposited");
    const auto lf = fit_loss_model(b.power, b.temp, {}, &shared_cache());
    const auto curve = infer_curve(b.power, lf.film, shared_cache());
    const auto fit = fit_self_heating({curve});
    CHECK(rel(fit.law.a_coeff, 7e-4) < 0.02);
    CHECK(fit.law.beta == 0.5);
    for (const auto& p : curve.points) CHECK(p.t_eff >= p.t_bp);
  }

  TEST_CASE("annealed input: T_eff at base within sigma, A consistent with zero") {
    const auto b = make_bundle("annealed");
    const auto lf = fit_loss_model(b.power, b.temp, {}, &shared_cache());
    const auto curve = infer_curve(b.power, lf.film, shared_cache());
    int heated = 0;
    for (const auto& p : curve.points) {
      CHECK_FALSE(p.out_of_range);
      CHECK(p.t_eff - p.t_bp <= std::max(2.0 * p.sigma_t, 1e-12));
      heated += !p.at_base;
    }
    const auto fit = fit_self_heating({curve});
    if (heated == 0) CHECK(fit.law.a_coeff == 0.0);
    else CHECK(fit.law.a_coeff < 2.0 * fit.sigma_a);
  }
}

TEST_SUITE("shape self-consistency") {
  bool non_monotone_with_min_in(const cli::Preset& p, const tlsmodel::FilmParams& film) {
    const auto& dev = device_a(p);
    const auto grid = inference::log_grid(1.0, 1e7, 71);
    std::vector<double> q;
    for (double n : grid) q.push_back(model_point({n, 0.01, 0, 1, "A", dev.f_sin, dev.f0}, film, shared_cache()));
    const auto it = std::min_element(q.begin(), q.end());
    const double n_min = grid[static_cast<std::size_t>(it - q.begin())];
    return n_min >= 1e3 && n_min <= 1e6 && q.back() > *it * 1.05;
  }

  TEST_CASE("non-monotone iff relaxation and heating are both present") {
    const auto b = make_bundle("as-deposited");
    const auto lf = fit_loss_model(b.power, b.temp, {}, &shared_cache());
    CHECK(non_monotone_with_min_in(b.preset, lf.film));
    auto no_rel = lf.film;
    no_rel.tan_rel = 0.0;
    CHECK_FALSE(non_monotone_with_min_in(b.preset, no_rel));
    auto no_heat = lf.film;
    no_heat.heat->a_coeff = 0.0;
    CHECK_FALSE(non_monotone_with_min_in(b.preset, no_heat));
  }
}

TEST_SUITE("converge_detuning") {
  DetuningModel model_for(const cli::Preset& p) {
    DetuningModel m;
    m.film = p.film;
    m.dev = device_a(p);
    m.t_bp = p.t_bp;
    m.cache = &shared_cache();
    return m;
  }

  double power_for(const DetuningModel& m, double n) {
    return response::incident_power_for(m.resonator(n), n, 1.5e6);
  }

  TEST_CASE("zero-shift model converges in one iteration") {
    auto p = cli::annealed_preset();
    p.film.heat.reset();
    const auto m = model_for(p);
    const auto r = converge_detuning(1.5e6, power_for(m, 1e5), m);
    CHECK(r.iterations == 1);
    CHECK(r.detuning == doctest::Approx(1.5e6).epsilon(1e-12));
    CHECK(r.n_bar == doctest::Approx(1e5).epsilon(1e-9));
  }

  TEST_CASE("as-deposited at high power") {
    const auto m = model_for(cli::as_deposited_preset());
    const auto r = converge_detuning(1.5e6, power_for(m, 1e6), m);
    CHECK(r.iterations > 1);
    CHECK(std::abs(r.detuning - 1.5e6) < 1e-4 * 1.5e6);
    CHECK(r.t_eff > 0.5);
  }

  TEST_CASE("as-deposited across 1..1e7 photons within 20 iterations") {
    const auto m = model_for(cli::as_deposited_preset());
    for (double n : inference::log_grid(1.0, 1e7, 8)) {
      const auto r = converge_detuning(1.5e6, power_for(m, n), m);
      CHECK(r.iterations <= 20);
      CHECK(std::abs(r.detuning - 1.5e6) < 1e-4 * 1.5e6);
    }
  }

  TEST_CASE("first-iteration mismatch is linear in the initial f0 error") {
    const auto m = model_for(cli::as_deposited_preset());
    const double p = power_for(m, 1e4);
    auto first = [&](double err) {
      DetuningOptions o;
      o.initial_f0_error = err;
      return converge_detuning(1.5e6, p, m, o).first_mismatch;
    };
    const double m0 = first(0.0);
    const double ratio = (first(2e4) - m0) / (first(1e4) - m0);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
  }

  TEST_CASE("iteration cap reports the last iterates") {
    const auto m = model_for(cli::as_deposited_preset());
    DetuningOptions o;
    o.max_iterations = 1;
    o.rel_tol = 1e-15;
    CHECK_THROWS_AS(converge_detuning(1.5e6, power_for(m, 1e6), m, o), ConvergenceError);
    CHECK_THROWS_AS(converge_detuning(0.0, 1e-15, m), DomainError);
  }
}
