// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tlsloss/cli/commands.hpp"
#include "tlsloss/cli/presets.hpp"
#include "tlsloss/cli/simulate.hpp"
#include "tlsloss/constants.hpp"
#include "tlsloss/ftir/hydrogen.hpp"
#include "tlsloss/ftir/peaks.hpp"
#include "tlsloss/inference/detuning.hpp"
#include "tlsloss/inference/loss_fit.hpp"
#include "tlsloss/inference/synthetic.hpp"
#include "tlsloss/io/csv.hpp"
#include "tlsloss/io/formats.hpp"
#include "tlsloss/numerics/quadrature.hpp"
#include "tlsloss/numerics/roots.hpp"
#include "tlsloss/numerics/special.hpp"
#include "tlsloss/response/fit.hpp"
#include "tlsloss/response/sweep.hpp"
#include "tlsloss/tlsmodel/loss.hpp"
#include "tlsloss/tlsmodel/relaxation.hpp"

using namespace tlsloss;
namespace fs = std::filesystem;

namespace {

// Frozen oracle values (mpmath, 25 digits): maximizer and full width at half
// maximum, in units of 2kT, of xi^2 sech^2(xi) coth(xi).
constexpr double kXiStar = 0.9575040240772687;
constexpr double kFwhmXi = 1.766622860726614;

// Published resonator table: f0 (GHz), Qi^-1 and |Qe^-1| (1e-5).
struct TableRow {
  double f0_ghz, qi_e5, qe_e5;
};
constexpr TableRow kMeasuredDevices[] = {{5.968, 18.4, 9.3}, {6.133, 16.2, 10.3}, {6.289, 12.5, 22.4}, {6.384, 7.5, 9.8},
                                 {6.480, 1.9, 15.3}, {5.959, 2.4, 9.8},   {6.103, 2.2, 12.4}, {6.271, 1.9, 23.1},
                                 {6.362, 1.3, 8.7},  {6.443, 0.8, 16.6}};

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Scratch {
  fs::path root;
  Scratch() {
    std::random_device rd;
    root = fs::temp_directory_path() / ("tlsloss_acceptance_" + std::to_string(rd()));
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
};

Scratch& scratch() {
  static Scratch s;
  return s;
}

cli::CommandOutcome run_cmd(cli::CommandOutcome (*cmd)(const cli::RunConfig&, std::ostream&), cli::RunConfig c) {
  std::ostringstream log;
  return cmd(c, log);
}

std::map<std::string, io::json> params_by_name(const io::json& report) {
  std::map<std::string, io::json> m;
  for (const auto& p : report.at("parameters")) m[p.at("name").get<std::string>()] = p;
  return m;
}

double value(const std::map<std::string, io::json>& p, const std::string& k) { return p.at(k).at("value"); }
double sigma(const std::map<std::string, io::json>& p, const std::string& k) { return p.at(k).at("sigma"); }

// ---- criteria ------------------------------------------------------------------------

Outcome c1_quadrature_identity() {
  double worst = 0.0;
  for (double a : inference::log_grid(1e-3, 1e3, 13)) {
    numerics::QuadratureSpec spec;
    spec.lower = a;
    spec.rel_tol = 1e-12;
    spec.singularity = numerics::Singularity::lower_sqrt;
    const double v = numerics::integrate([a](double x) { return std::sqrt(1.0 - a / x) / (x * x); }, spec).value;
    worst = std::max(worst, rel(v, 2.0 / (3.0 * a)));
  }
  return {worst < 1e-8, "max relative error " + fmt(worst, 3) + " over a in [1e-3, 1e3] (limit 1e-8)"};
}

Outcome c2_relaxation_asymptotes() {
  const double f0 = 6e9;
  double worst_slow = 0.0, worst_fast = 0.0, worst_slope = 0.0;
  const auto k2 = tlsmodel::RelaxKernelParams::defaults(2);
  const auto temps = inference::log_grid(0.05, 0.5, 10);
  for (double t : temps)
    worst_slow = std::max(worst_slow, rel(tlsmodel::q_rel_inv_full(t, f0, 1.0, k2),
                                          tlsmodel::q_rel_inv_slow_limit(t, f0, 1.0, k2)));
  // Forced fast regime: raise the coupling until w0 tau_min < 1e-3 down to
  // E = 0.2 kT (xi = 0.1), the low end of the thermally sampled energies.
  double max_boost = 0.0;
  for (double t : temps) {
    auto fast = k2;
    double boost = 1e4;
    fast.gamma_bar = k2.gamma_bar * boost;
    while (tlsmodel::omega_tau_min(0.1, t, f0, fast) >= 1e-3) {
      boost *= 10.0;
      fast.gamma_bar = k2.gamma_bar * boost;
    }
    max_boost = std::max(max_boost, boost);
    worst_fast = std::max(worst_fast, rel(tlsmodel::q_rel_inv_full(t, f0, 1.0, fast), tlsmodel::q_rel_inv_fast_limit(1.0)));
  }
  std::string slopes;
  for (int d = 1; d <= 3; ++d) {
    const auto k = tlsmodel::RelaxKernelParams::defaults(d);
    // least-squares slope of log q against log T over 50-150 mK
    const auto ts = inference::log_grid(0.05, 0.15, 7);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double t : ts) {
      const double x = std::log(t), y = std::log(tlsmodel::q_rel_inv_full(t, f0, 1.0, k));
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double n = static_cast<double>(ts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    worst_slope = std::max(worst_slope, std::abs(slope - d));
    slopes += (d > 1 ? ", " : "") + fmt(slope, 5);
  }
  const bool ok = worst_slow < 0.01 && worst_fast < 0.01 && worst_slope < 0.05;
  return {ok, "slow-limit dev " + fmt(worst_slow, 3) + ", fast-limit dev " + fmt(worst_fast, 3) +
                  " (coupling x" + fmt(max_boost, 2) + ") (limit 1%); slopes d=1..3: " + slopes + " (+-0.05)"};
}

Outcome c3_sampling_distribution() {
  double worst_arg = 0.0, worst_fwhm = 0.0, arg_vs_2kt = 0.0, fwhm_units = 0.0;
  for (double t : {0.05, 0.5}) {
    const double two_kt = 2.0 * constants::boltzmann * t;
    auto f = [&](double e) { return tlsmodel::rel_sampling_integrand(e, t, 2); };
    const double e_star =
        numerics::minimize_scalar([&](double e) { return -f(e); }, 0.1 * two_kt, 5.0 * two_kt, 1e-12 * two_kt);
    const double peak = f(e_star);
    auto half = [&](double e) { return f(e) - 0.5 * peak; };
    const double lo = numerics::find_root(half, 1e-3 * two_kt, e_star, {1e-14 * two_kt});
    const double hi = numerics::find_root(half, e_star, 10.0 * two_kt, {1e-14 * two_kt});
    worst_arg = std::max(worst_arg, rel(e_star, kXiStar * two_kt));
    arg_vs_2kt = std::max(arg_vs_2kt, rel(e_star, two_kt));
    fwhm_units = (hi - lo) / two_kt;
    worst_fwhm = std::max(worst_fwhm, rel(fwhm_units, 1.7));
  }
  const bool ok = worst_arg < 0.10 && worst_fwhm < 0.10;
  return {ok, "argmax " + fmt(kXiStar * (1 + worst_arg), 6) + " x 2kT (analytic " + fmt(kXiStar, 6) + ", dev " +
                  fmt(worst_arg, 2) + "; vs 2kT " + fmt(arg_vs_2kt, 3) + "); FWHM " + fmt(fwhm_units, 5) +
                  " x 2kT (1.7 +- 10%; exact " + fmt(kFwhmXi, 5) + ")"};
}

Outcome c4_s21_round_trip() {
  using namespace response;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> logq(3.0, 6.0), phi(-0.5, 0.5), split(0.1, 0.9), fghz(4.0, 8.0);
  std::vector<ResonatorParams> cases;
  for (const auto& r : kMeasuredDevices) cases.push_back(make_resonator(r.f0_ghz * 1e9, r.qi_e5 * 1e-5, r.qe_e5 * 1e-5));
  for (int i = 0; i < 50; ++i) {
    const double qinv = std::pow(10.0, -logq(rng));
    const double ph = phi(rng), r = split(rng);
    cases.push_back(make_resonator(fghz(rng) * 1e9, (1.0 - r) * qinv, r * qinv / std::cos(ph), ph));
  }
  double worst = 0.0;
  for (const auto& p : cases) {
    const auto f = fit_s21(synth_sweep(p, default_grid(p))).params;
    worst = std::max({worst, rel(f.f0, p.f0), rel(f.q_total_inv, p.q_total_inv), rel(f.q_ext_inv_mag, p.q_ext_inv_mag),
                      rel(f.q_int_inv, p.q_int_inv), std::abs(f.phi - p.phi)});
  }
  double worst_median = 0.0;
  for (const auto& row : kMeasuredDevices) {
    const auto p = make_resonator(row.f0_ghz * 1e9, row.qi_e5 * 1e-5, row.qe_e5 * 1e-5);
    const auto grid = default_grid(p);
    std::vector<double> e;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto f = fit_s21(synth_sweep(p, grid, {1e-3, seed})).params;
      e.push_back(std::max({rel(f.q_int_inv, p.q_int_inv), rel(f.q_ext_inv_mag, p.q_ext_inv_mag),
                            rel(f.q_total_inv, p.q_total_inv)}));
    }
    worst_median = std::max(worst_median, median(e));
  }
  return {worst < 1e-8 && worst_median < 0.01,
          "noiseless max error " + fmt(worst, 3) + " over 60 sets (limit 1e-8); 1e-3 noise: worst median error " +
              fmt(100 * worst_median, 3) + "% over 100 seeds x 10 table sets (limit 1%)"};
}

// The synthetic bundles and their fits are shared by criteria 5-7.
struct LossRun {
  bool ok = false;
  std::string error;
  fs::path bundle;
  std::map<std::string, io::json> dep, ann;
};

LossRun& loss_run() {
  static LossRun r;
  static bool done = false;
  if (done) return r;
  done = true;
  try {
    cli::RunConfig sim;
    sim.seed = kSeed;
    sim.out_dir = scratch().root / "bundle";
    run_cmd(cli::cmd_simulate, sim);
    r.bundle = sim.out_dir;
    for (const char* film : {"as-deposited", "annealed"}) {
      cli::RunConfig c;
      c.power_csv = r.bundle / film / "power.csv";
      c.temperature_csv = r.bundle / film / "temperature.csv";
      c.out_dir = scratch().root / "fit" / film;
      run_cmd(cli::cmd_fit_loss, c);
      (std::string(film) == "annealed" ? r.ann : r.dep) =
          params_by_name(io::read_json(c.out_dir / "fit_loss_report.json"));
    }
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

Outcome c5_loss_round_trip() {
  const auto& r = loss_run();
  if (!r.ok) return {false, "pipeline error: " + r.error};
  const double e_res = rel(value(r.dep, "tan_res"), 1.4e-3), e_rel = rel(value(r.dep, "tan_rel"), 3.4e-3);
  const double an_rel = value(r.ann, "tan_rel"), an_sig = sigma(r.ann, "tan_rel");
  const double e_an_res = rel(value(r.ann, "tan_res"), 4.8e-4);
  const bool ok = e_res < 0.05 && e_rel < 0.05 && std::abs(an_rel) < 2.0 * an_sig;
  // Context only: the annealed generator value sits near one sigma above
  // zero, so the 2-sigma test passes for only part of the noise draws. The
  // verdict above uses the fixed seed; the ensemble shows the spread.
  int within = 0;
  double pull_sum = 0.0;
  const int n_ens = 20;
  for (int k = 0; k < n_ens; ++k) {
    cli::RunConfig sim;
    sim.seed = 1000 + static_cast<std::uint64_t>(k);
    sim.scenario.films = {"annealed"};
    sim.out_dir = scratch().root / ("ens" + std::to_string(k));
    run_cmd(cli::cmd_simulate, sim);
    cli::RunConfig c;
    c.power_csv = sim.out_dir / "annealed" / "power.csv";
    c.temperature_csv = sim.out_dir / "annealed" / "temperature.csv";
    c.out_dir = sim.out_dir / "fit";
    run_cmd(cli::cmd_fit_loss, c);
    const auto p = params_by_name(io::read_json(c.out_dir / "fit_loss_report.json"));
    within += std::abs(value(p, "tan_rel")) < 2.0 * sigma(p, "tan_rel");
    pull_sum += (value(p, "tan_rel") - 8e-6) / sigma(p, "tan_rel");
  }
  return {ok, "as-deposited tan_res " + fmt(value(r.dep, "tan_res")) + " (" + fmt(100 * e_res, 2) + "%), tan_rel " +
                  fmt(value(r.dep, "tan_rel")) + " (" + fmt(100 * e_rel, 2) + "%) [limit 5%]; annealed tan_res " +
                  fmt(value(r.ann, "tan_res")) + " (" + fmt(100 * e_an_res, 2) + "%), tan_rel " + fmt(an_rel, 3) +
                  " +- " + fmt(an_sig, 2) + " = " + fmt(an_rel / an_sig, 3) + " sigma (|value| < 2 sigma, seed " +
                  std::to_string(kSeed) + "); ensemble context: " + std::to_string(within) + "/" +
                  std::to_string(n_ens) + " seeds within 2 sigma, mean pull vs generator " +
                  fmt(pull_sum / n_ens, 2)};
}

Outcome c6_ratios() {
  const auto& r = loss_run();
  if (!r.ok) return {false, "pipeline error: " + r.error};
  const double res_ratio = value(r.dep, "tan_res") / value(r.ann, "tan_res");
  // The annealed relaxation loss is consistent with zero, so the ratio is
  // bounded from below using the 2-sigma upper limit on the annealed value.
  const double an_upper = std::max(value(r.ann, "tan_rel"), 0.0) + 2.0 * sigma(r.ann, "tan_rel");
  const double rel_ratio_bound = value(r.dep, "tan_rel") / an_upper;
  const double rel_ratio_point = value(r.dep, "tan_rel") / value(r.ann, "tan_rel");
  const bool ok = std::abs(res_ratio - 2.9) <= 0.3 && rel_ratio_bound > 100.0;
  return {ok, "resonant ratio " + fmt(res_ratio) + " (2.9 +- 0.3); relaxation ratio lower bound " +
                  fmt(rel_ratio_bound) + " using the annealed 2-sigma upper limit (> 100; point estimate " +
                  fmt(rel_ratio_point) + ")"};
}

Outcome c7_thermometry() {
  const auto& r = loss_run();
  if (!r.ok) return {false, "pipeline error: " + r.error};
  cli::RunConfig c;
  c.power_csv = r.bundle / "as-deposited" / "power.csv";
  c.film_json = scratch().root / "fit" / "as-deposited" / "film_fit.json";
  c.out_dir = scratch().root / "thermometry";
  run_cmd(cli::cmd_thermometry, c);
  const auto rep = io::read_json(c.out_dir / "self_heating.json");
  const double a = rep.at("law").at("a_kelvin"), a_true = cli::as_deposited_preset().film.heat->a_coeff;
  double t_min_at_top = std::numeric_limits<double>::infinity();
  int n_top = 0;
  for (const auto& p : io::read_self_heating_csv(c.out_dir / "self_heating.csv").points)
    if (p.n_bar == 1e7 && !p.out_of_range) {
      t_min_at_top = std::min(t_min_at_top, p.t_eff);
      ++n_top;
    }
  const bool ok = rel(a, a_true) < 0.02 && n_top == 5 && t_min_at_top > 2.0;
  return {ok, "A = " + fmt(a, 6) + " K vs " + fmt(a_true) + " (" + fmt(100 * rel(a, a_true), 2) +
                  "%, limit 2%); lowest T_eff at n = 1e7 over " + std::to_string(n_top) + " devices: " +
                  fmt(t_min_at_top) + " K (> 2 K)"};
}

Outcome c8_shape() {
  const auto grid = inference::log_grid(1.0, 1e7, 71);
  bool ok = true;
  std::string detail;
  for (const auto& preset : {cli::as_deposited_preset(), cli::annealed_preset()}) {
    inference::RelaxationCache cache(preset.film.kernel);
    const bool dep = preset.name == "as-deposited";
    double n_min_lo = 1e300, n_min_hi = 0.0, worst_rise = 1e300, worst_step = -1e300;
    for (const auto& dev : preset.devices) {
      std::vector<double> q;
      for (double n : grid) q.push_back(inference::model_point({n, preset.t_bp, 0, 1, dev.id, dev.f_sin, dev.f0},
                                                               preset.film, cache));
      const auto it = std::min_element(q.begin(), q.end());
      const double n_min = grid[static_cast<std::size_t>(it - q.begin())];
      n_min_lo = std::min(n_min_lo, n_min);
      n_min_hi = std::max(n_min_hi, n_min);
      worst_rise = std::min(worst_rise, q.back() / *it);
      for (std::size_t i = 1; i < q.size(); ++i) worst_step = std::max(worst_step, q[i] / q[i - 1] - 1.0);
    }
    if (dep) {
      ok &= n_min_lo >= 1e3 && n_min_hi <= 1e6 && worst_rise > 1.05;
      detail += "as-deposited minimum at n in [" + fmt(n_min_lo, 3) + ", " + fmt(n_min_hi, 3) +
                "] (within [1e3, 1e6]), tail/minimum >= " + fmt(worst_rise, 3);
    } else {
      ok &= worst_step <= 1e-12;
      detail += "; annealed largest step-to-step increase " + fmt(worst_step, 3) + " (monotone non-increasing)";
    }
  }
  return {ok, detail};
}

Outcome c9_detuning() {
  const auto p = cli::as_deposited_preset();
  inference::RelaxationCache cache(p.film.kernel);
  int worst_iter = 0, runs = 0;
  double worst_mismatch = 0.0;
  for (const auto& dev : p.devices) {
    inference::DetuningModel m{p.film, dev, p.t_bp, &cache};
    for (double n : inference::log_grid(1.0, 1e7, 15)) {
      const double power = response::incident_power_for(m.resonator(n), n, 1.5e6);
      const auto r = inference::converge_detuning(1.5e6, power, m);
      worst_iter = std::max(worst_iter, r.iterations);
      worst_mismatch = std::max(worst_mismatch, std::abs(r.detuning - 1.5e6) / 1.5e6);
      ++runs;
    }
  }
  return {worst_iter <= 20 && worst_mismatch < 1e-4,
          std::to_string(runs) + " runs over 5 devices x n in [1, 1e7]: max iterations " + std::to_string(worst_iter) +
              " (<= 20), max mismatch " + fmt(100 * worst_mismatch, 3) + "% (< 0.01%)"};
}

Outcome c10_quasiparticles() {
  const tlsmodel::QpParams qp{15.0, 1.0, 6e9};
  double worst = 0.0;
  for (double t : inference::log_grid(0.01, 1.0, 41)) worst = std::max(worst, tlsmodel::q_qp_inv(t, qp));
  return {worst < 1e-12, "max Qqp^-1 on [10 mK, 1 K] = " + fmt(worst, 3) + " (< 1e-12)"};
}

ftir::HydrogenResult analyse(const ftir::IrSpectrum& raw) {
  const auto seeds = ftir::default_seeds();
  const auto corrected = ftir::remove_baseline(raw, 3, ftir::seed_windows(seeds));
  const auto peaks = ftir::fit_peaks(corrected, seeds);
  return ftir::hydrogen_content(peaks[1], peaks[0], raw.thickness_cm);
}

double truth_percent(const ftir::SpectrumSpec& s) {
  ftir::PeakModel nh, sih;
  const double k = std::sqrt(2.0 * std::numbers::pi);
  nh.area = s.lines[0].amplitude * s.lines[0].sigma * k;
  sih.area = s.lines[1].amplitude * s.lines[1].sigma * k;
  return ftir::hydrogen_content(sih, nh, s.thickness_cm).atomic_h_percent;
}

Outcome c11_ftir() {
  cli::Scenario sc;
  auto spec = cli::ftir_spec("as-deposited", 500.0, sc, 11);
  spec.noise_sigma = 0.0;
  const double e0 = rel(analyse(ftir::synth_spectrum(spec)).atomic_h_percent, truth_percent(spec));
  // 0.5% noise: relative to the strongest line (N-H, 0.02 absorbance at 500 nm).
  spec.noise_sigma = 0.005 * spec.lines[0].amplitude;
  const double e1 = rel(analyse(ftir::synth_spectrum(spec)).atomic_h_percent, truth_percent(spec));
  std::vector<double> pct;
  for (double t : {500.0, 600.0, 700.0, 800.0}) {
    auto s = cli::ftir_spec("as-deposited", t, sc, 20 + static_cast<std::uint64_t>(t));
    s.noise_sigma = 0.005 * cli::ftir_spec("as-deposited", 500.0, sc, 0).lines[0].amplitude;
    pct.push_back(analyse(ftir::synth_spectrum(s)).atomic_h_percent);
  }
  double spread = 0.0;
  for (double p : pct) spread = std::max(spread, rel(p, pct[0]));
  auto dep = cli::ftir_spec("as-deposited", 500.0, sc, 31), ann = cli::ftir_spec("annealed", 500.0, sc, 32);
  const double ratio = analyse(ftir::synth_spectrum(dep)).atomic_h_percent / analyse(ftir::synth_spectrum(ann)).atomic_h_percent;
  const bool ok = e0 < 0.01 && e1 < 0.05 && spread < 0.02 && ratio > 10.0;
  return {ok, "noiseless %H error " + fmt(100 * e0, 3) + "% (< 1%), 0.5% noise " + fmt(100 * e1, 3) +
                  "% (< 5%); thickness spread " + fmt(100 * spread, 3) + "% (< 2%); as-deposited/annealed %H ratio " +
                  fmt(ratio) + " for area ratio " + fmt(sc.annealed_area_ratio) + " (> 10)"};
}

double k0_integral_oracle(double x) {
  const double tmax = std::acosh(std::max(745.0 / x, 1.0) + 1.0);
  auto f = [x](double t) { return std::exp(-x * std::cosh(t)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, tmax, 12, 1e-14);
}

Outcome c12_special_functions() {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> re(1e-3, 50.0), im(-50.0, 50.0);
  double worst_rec = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::complex<double> z(re(rng), im(rng));
    const auto lhs = numerics::digamma(z + 1.0);
    worst_rec = std::max(worst_rec, std::abs(lhs - numerics::digamma(z) - 1.0 / z) / std::max(1.0, std::abs(lhs)));
  }
  const double psi1 = std::abs(numerics::digamma(1.0) + std::numbers::egamma);
  double worst_k0 = 0.0;
  for (double x : inference::log_grid(1e-6, 500.0, 40))
    worst_k0 = std::max(worst_k0, rel(numerics::bessel_k0(x), k0_integral_oracle(x)));
  return {worst_rec < 1e-11 && psi1 < 1e-11 && worst_k0 < 1e-10,
          "digamma recurrence " + fmt(worst_rec, 3) + ", |psi(1) + gamma| " + fmt(psi1, 3) + " (< 1e-11); K0 vs " +
              "integral representation " + fmt(worst_k0, 3) + " (< 1e-10)"};
}

Outcome c13_determinism() {
  const fs::path a = scratch().root / "det_a", b = scratch().root / "det_b";
  for (const auto& dir : {a, b}) {
    std::ostringstream out, err;
    const int code = cli::run_cli({"simulate", "--seed", "13", "--out", dir.string()}, out, err);
    if (code != 0) return {false, "simulate exited with " + std::to_string(code) + ": " + err.str()};
  }
  int files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const auto other = b / fs::relative(e.path(), a);
    ++files;
    if (!fs::exists(other) || io::read_text(e.path()) != io::read_text(other)) ++differ;
  }
  int files_b = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) files_b += e.is_regular_file();
  return {differ == 0 && files == files_b && files > 0,
          std::to_string(files) + " files, " + std::to_string(differ) + " differing between two runs with seed 13"};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
  double budget_s;  // 0 = no runtime limit
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "quadrature identity", c1_quadrature_identity, 1.0},
      {2, "relaxation asymptotes", c2_relaxation_asymptotes, 30.0},
      {3, "sampling distribution", c3_sampling_distribution, 0.0},
      {4, "S21 round trip", c4_s21_round_trip, 20.0},
      {5, "loss-model round trip", c5_loss_round_trip, 120.0},
      {6, "annealing ratios", c6_ratios, 0.0},
      {7, "thermometry", c7_thermometry, 0.0},
      {8, "loss-vs-power shapes", c8_shape, 0.0},
      {9, "detuning convergence", c9_detuning, 0.0},
      {10, "quasiparticle negligibility", c10_quasiparticles, 0.0},
      {11, "FT-IR hydrogen", c11_ftir, 0.0},
      {12, "special functions", c12_special_functions, 0.0},
      {13, "simulate determinism", c13_determinism, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt(secs, 3) + " s";
    if (c.budget_s > 0.0) {
      timing += " (limit " + fmt(c.budget_s) + " s)";
      if (secs >= c.budget_s) o.pass = false;
    }
    failed += !o.pass;
    std::printf("%s C%02d %s: %s; %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
