#include "tlsloss/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "tlsloss/cli/simulate.hpp"
#include "tlsloss/error.hpp"
#include "tlsloss/ftir/hydrogen.hpp"
#include "tlsloss/ftir/peaks.hpp"
#include "tlsloss/inference/loss_fit.hpp"
#include "tlsloss/inference/synthetic.hpp"
#include "tlsloss/inference/thermometry.hpp"
#include "tlsloss/io/csv.hpp"
#include "tlsloss/io/formats.hpp"
#include "tlsloss/io/svg.hpp"
#include "tlsloss/response/fit.hpp"

namespace tlsloss::cli {

using io::json;

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) fn(i);
    });
  for (auto& t : pool) t.join();
}

namespace {

// Output stems for the inputs; duplicates get the input index as a prefix.
std::vector<std::string> output_stems(const std::vector<fs::path>& inputs) {
  std::map<std::string, int> count;
  for (const auto& p : inputs) ++count[p.stem().string()];
  std::vector<std::string> stems;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto s = inputs[i].stem().string();
    stems.push_back(count[s] > 1 ? std::to_string(i) + "_" + s : s);
  }
  return stems;
}

// Per-item result slot, filled by a worker and reported in input order.
struct ItemLog {
  bool ok = false;
  std::string message;
  std::vector<std::string> written;
};

void report_items(const std::vector<fs::path>& inputs, const std::vector<ItemLog>& items, std::ostream& log,
                  CommandOutcome& out, json& errors) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].ok) {
      out.written.insert(out.written.end(), items[i].written.begin(), items[i].written.end());
      if (!items[i].message.empty()) log << "[" << i << "] " << inputs[i].string() << ": " << items[i].message << "\n";
    } else {
      ++out.failures;
      log << "[" << i << "] " << inputs[i].string() << ": FAILED: " << items[i].message << "\n";
      errors.push_back(json{{"index", i}, {"file", inputs[i].string()}, {"error", items[i].message}});
    }
  }
}

void require_inputs(const RunConfig& c) {
  if (c.inputs.empty()) throw SchemaError("inputs", "at least one input file is required");
}

// Device table path: explicit, else devices.json next to the power sweep.
fs::path devices_path(const RunConfig& c) {
  if (c.devices_json) return *c.devices_json;
  if (c.power_csv) {
    auto p = c.power_csv->parent_path() / "devices.json";
    if (fs::exists(p)) return p;
  }
  throw SchemaError("devices_json", "a device table is required (none given and no devices.json next to power_csv)");
}

// ---- fit-s21 -------------------------------------------------------------------------

struct S21Row {
  std::string device_id;
  response::S21Fit fit;
  double n_bar = 0.0;
};

}  // namespace

CommandOutcome cmd_fit_s21(const RunConfig& config, std::ostream& log) {
  require_inputs(config);
  config.validate();
  const auto stems = output_stems(config.inputs);
  const fs::path out_dir = config.out_dir;
  const json cfg = config_to_json(config);

  std::vector<ItemLog> items(config.inputs.size());
  std::vector<std::optional<S21Row>> rows(config.inputs.size());
  parallel_for(config.inputs.size(), config.jobs, [&](std::size_t i) {
    try {
      auto sweep = io::read_sweep(config.inputs[i]);
      if (config.normalize_sweeps) sweep = response::normalize_sweep(sweep);
      S21Row row;
      row.device_id = sweep.device_id.empty() ? stems[i] : sweep.device_id;
      row.fit = response::fit_s21(sweep);
      row.n_bar = sweep.drive_power_incident > 0.0
                      ? response::photon_number(row.fit.params, sweep.drive_power_incident, sweep.drive_detuning)
                      : std::numeric_limits<double>::quiet_NaN();
      json j = io::s21_fit_to_json(row.fit, row.device_id);
      j["file"] = config.inputs[i].string();
      j["n_bar"] = io::number_json(row.n_bar);
      j["p_inc_watt"] = sweep.drive_power_incident;
      j["detuning_hz"] = sweep.drive_detuning;
      j["t_bp_kelvin"] = sweep.base_temp;
      j["config"] = cfg;
      const auto path = out_dir / "fits" / (stems[i] + ".json");
      io::write_json(path, j);
      items[i].written.push_back(path.string());
      items[i].ok = true;
      if (!row.fit.converged) items[i].message = "warning: " + row.fit.message;
      rows[i] = std::move(row);
    } catch (const std::exception& e) {
      items[i].message = e.what();
    }
  });

  CommandOutcome out;
  json errors = json::array();
  report_items(config.inputs, items, log, out, errors);

  // Summary in the layout of the usual resonator table: frequency in GHz,
  // losses in units of 1e-5.
  io::CsvTable summary;
  summary.header = {"device_id", "file", "f0_ghz", "qi_inv_e5", "qe_inv_e5", "f0_sigma_ghz", "qi_inv_sigma_e5",
                    "qe_inv_sigma_e5", "n_bar"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) continue;
    const auto& p = rows[i]->fit.params;
    summary.rows.push_back({rows[i]->device_id, config.inputs[i].string(), io::format_number(p.f0 * 1e-9),
                            io::format_number(p.q_int_inv * 1e5), io::format_number(p.q_ext_inv_mag * 1e5),
                            io::format_number(p.sigmas.f0 * 1e-9), io::format_number(p.sigmas.q_int_inv * 1e5),
                            io::format_number(p.sigmas.q_ext_inv_mag * 1e5), io::format_number(rows[i]->n_bar)});
  }
  io::write_csv(out_dir / "summary.csv", summary);
  out.written.push_back((out_dir / "summary.csv").string());
  io::write_json(out_dir / "fit_s21_report.json",
                 json{{"inputs", config.inputs.size()}, {"fitted", summary.rows.size()}, {"failures", errors},
                      {"config", cfg}});
  out.written.push_back((out_dir / "fit_s21_report.json").string());
  return out;
}

// ---- fit-loss ------------------------------------------------------------------------

namespace {

double film_param(const tlsmodel::FilmParams& f, int i) {
  switch (i) {
    case inference::kTanRes: return f.tan_res;
    case inference::kNc: return f.n_c;
    case inference::kTanRel: return f.tan_rel;
    case inference::kQbg: return f.q_bg_inv;
    case inference::kHeatA: return f.heat ? f.heat->a_coeff : 0.0;
    case inference::kHeatBeta: return f.heat ? f.heat->beta : 0.5;
  }
  return 0.0;
}

const char* param_unit(int i) {
  switch (i) {
    case inference::kNc: return "photons";
    case inference::kHeatA: return "K";
    default: return "1";
  }
}

bool param_enabled(const tlsmodel::ModelTerms& t, int i) {
  switch (i) {
    case inference::kTanRes:
    case inference::kNc: return t.resonant;
    case inference::kTanRel: return t.relaxation;
    case inference::kQbg: return t.background;
    default: return t.self_heating;
  }
}

std::map<std::string, std::vector<const inference::LossPoint*>> by_device(const inference::LossDataset& ds) {
  std::map<std::string, std::vector<const inference::LossPoint*>> m;
  for (const auto& p : ds.points) m[p.device_id].push_back(&p);
  return m;
}

// Evaluate without letting an out-of-table temperature abort a whole curve.
template <class F>
double safe_eval(F&& f) {
  try {
    return f();
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

CommandOutcome cmd_fit_loss(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (!config.power_csv) throw SchemaError("power_csv", "the power sweep is required");
  const auto devices = io::read_device_table(devices_path(config));
  const auto power = io::read_loss_dataset(*config.power_csv, devices, inference::SweepKind::power);
  inference::LossDataset temp;
  temp.kind = inference::SweepKind::temperature;
  if (config.temperature_csv)
    temp = io::read_loss_dataset(*config.temperature_csv, devices, inference::SweepKind::temperature);

  inference::LossFitConfig fc;
  fc.terms = config.terms;
  fc.d = config.d;
  fc.t0 = config.t0_kelvin;
  fc.frozen = config.frozen;
  fc.free_beta = config.free_beta;
  fc.jobs = config.jobs;
  fc.heat_gate_sigmas = config.tolerance("heat_gate_sigmas", fc.heat_gate_sigmas);
  for (const auto& [name, v] : config.frozen) {
    bool known = false;
    for (int i = 0; i < inference::kLossParamCount; ++i) known |= name == inference::loss_param_name(i);
    if (!known) throw SchemaError("frozen." + name, "unknown parameter");
  }
  inference::RelaxationCache cache(tlsmodel::RelaxKernelParams::defaults(config.d));
  const auto res = inference::fit_loss_model(power, temp, fc, &cache);

  const fs::path out_dir = config.out_dir;
  CommandOutcome out;
  json params = json::array();
  for (int i = 0; i < inference::kLossParamCount; ++i) {
    const bool enabled = param_enabled(config.terms, i);
    const bool gated = !res.heat_significant && (i == inference::kHeatA || i == inference::kHeatBeta) &&
                       !config.frozen.count(inference::loss_param_name(i));
    const std::string status = !enabled ? "disabled" : res.fitted[i] ? "fitted" : gated ? "not_significant" : "frozen";
    params.push_back(json{{"name", inference::loss_param_name(i)},
                          {"value", io::number_json(film_param(res.film, i))},
                          {"sigma", io::number_json(res.sigmas[i])},
                          {"unit", param_unit(i)},
                          {"status", status}});
  }
  const std::size_t np = power.points.size();
  std::vector<double> rp(res.residuals.begin(), res.residuals.begin() + static_cast<std::ptrdiff_t>(np));
  std::vector<double> rt(res.residuals.begin() + static_cast<std::ptrdiff_t>(np), res.residuals.end());
  json report{{"parameters", params},
              {"film", io::film_to_json(res.film)},
              {"chi2_dof", io::number_json(res.chi2_dof)},
              {"converged", res.fit.converged},
              {"iterations", res.fit.iterations},
              {"degenerate", res.degenerate},
              {"heat_delta_chi2", io::number_json(res.heat_delta_chi2)},
              {"warnings", res.warnings},
              {"residuals", {{"power", rp}, {"temperature", rt}}},
              {"points", {{"power", np}, {"temperature", temp.points.size()}}},
              {"config", config_to_json(config)}};
  if (res.degenerate) {
    std::string cause;
    for (const auto& w : res.warnings) cause += (cause.empty() ? "" : "; ") + w;
    report["degenerate_cause"] = cause;
  }
  io::write_json(out_dir / "fit_loss_report.json", report);
  io::write_json(out_dir / "film_fit.json", io::film_to_json(res.film));
  out.written = {(out_dir / "fit_loss_report.json").string(), (out_dir / "film_fit.json").string()};
  for (const auto& w : res.warnings) log << "warning: " << w << "\n";

  // Dense model curves per device, with and without self-heating.
  io::SvgPlot pplot{"Internal loss vs photon number", "n_bar", "Qi^-1", true, true, {}};
  io::SvgPlot tplot{"Internal loss vs temperature", "T (K)", "Qi^-1", true, true, {}};
  auto curves = [&](const inference::LossDataset& ds, bool is_power, io::SvgPlot& plot) {
    for (const auto& [id, pts] : by_device(ds)) {
      const auto& dev = devices.at(id);
      const auto* table = &cache.get(dev.f0);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      std::vector<double> xs, ys, ns, ts;
      for (auto* p : pts) {
        const double x = is_power ? p->n_bar : p->t_bp;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        xs.push_back(x);
        ys.push_back(p->q_int_inv);
        ns.push_back(p->n_bar);
        ts.push_back(p->t_bp);
      }
      std::sort(ns.begin(), ns.end());
      std::sort(ts.begin(), ts.end());
      const double n_fixed = ns[ns.size() / 2], t_fixed = ts[ts.size() / 2];
      const auto grid = hi > lo ? inference::log_grid(lo, hi, 121) : std::vector<double>{lo};
      io::CsvTable t;
      t.header = {is_power ? "n_bar" : "t_kelvin", "qi_inv_with_heating", "qi_inv_without_heating"};
      std::vector<double> yh, yn;
      for (double x : grid) {
        const double n = is_power ? x : n_fixed, tt = is_power ? t_fixed : x;
        yh.push_back(safe_eval([&] { return res.film.loss(dev, n, tt, table).total; }));
        yn.push_back(safe_eval([&] { return res.film.loss_no_heat(dev, n, tt, table).total; }));
        t.rows.push_back({io::format_number(x), io::format_number(yh.back()), io::format_number(yn.back())});
      }
      const auto path = out_dir / "curves" / ((is_power ? "power_" : "temperature_") + id + ".csv");
      io::write_csv(path, t);
      out.written.push_back(path.string());
      plot.series.push_back({id + " data", xs, ys, true});
      plot.series.push_back({id + " model", grid, yh, false});
    }
  };
  curves(power, true, pplot);
  curves(temp, false, tplot);
  io::write_svg(out_dir / "fit_loss_power.svg", pplot);
  out.written.push_back((out_dir / "fit_loss_power.svg").string());
  if (!temp.empty()) {
    io::write_svg(out_dir / "fit_loss_temperature.svg", tplot);
    out.written.push_back((out_dir / "fit_loss_temperature.svg").string());
  }
  return out;
}

// ---- thermometry ---------------------------------------------------------------------

namespace {

// A film JSON, or a fit-loss report holding one under "film".
tlsmodel::FilmParams film_from_file(const fs::path& path, std::map<std::string, tlsmodel::FilmParams>& per_device) {
  const auto j = io::read_json(path);
  if (j.contains("per_device")) {
    for (const auto& [id, f] : j.at("per_device").items()) per_device[id] = io::film_from_json(f);
    if (!j.contains("film")) return per_device.begin()->second;
  }
  return io::film_from_json(j.contains("film") ? j.at("film") : j);
}

}  // namespace

CommandOutcome cmd_thermometry(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (!config.power_csv) throw SchemaError("power_csv", "the power sweep is required");
  if (!config.film_json) throw SchemaError("film_json", "a fitted film model is required (e.g. film_fit.json)");
  const auto devices = io::read_device_table(devices_path(config));
  const auto power = io::read_loss_dataset(*config.power_csv, devices, inference::SweepKind::power);
  std::map<std::string, tlsmodel::FilmParams> per_device;
  const auto film = film_from_file(*config.film_json, per_device);
  const auto mode =
      config.thermometry_mode == "per-device" ? inference::ThermometryMode::per_device : inference::ThermometryMode::shared;
  if (mode == inference::ThermometryMode::per_device)
    for (const auto& p : power.points)
      if (!per_device.count(p.device_id))
        throw SchemaError("film_json", "per-device mode needs a film for device '" + p.device_id + "'");

  inference::ThermometryOptions topts;
  topts.t_hi = config.tolerance("thermometry_t_hi_kelvin", topts.t_hi);
  topts.detection_sigmas = config.tolerance("detection_sigmas", topts.detection_sigmas);
  inference::RelaxationCache cache(film.kernel);
  std::vector<double> f0s;
  for (const auto& p : power.points) f0s.push_back(p.f0);
  cache.prefetch(f0s, config.jobs);
  auto curve = inference::infer_curve(power, film, cache, mode, per_device, topts);

  inference::SelfHeatingOptions sopts;
  sopts.free_beta = config.free_beta;
  sopts.min_decades = config.tolerance("min_decades", sopts.min_decades);
  const auto fit = inference::fit_self_heating({curve}, sopts);
  curve.fitted_law = fit.law;

  CommandOutcome out;
  int n_ok = 0, n_base = 0;
  json out_of_range = json::array();
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    if (p.out_of_range) {
      out_of_range.push_back(json{{"index", i}, {"device_id", p.device_id}, {"n_bar", p.n_bar}, {"message", p.message}});
      log << "[" << i << "] device " << p.device_id << " n_bar " << p.n_bar << ": out of range: " << p.message << "\n";
    } else if (p.at_base) {
      ++n_base;
    } else {
      ++n_ok;
    }
  }
  const fs::path out_dir = config.out_dir;
  io::write_self_heating_csv(out_dir / "self_heating.csv", curve);
  std::map<std::string, double> per_a = fit.per_device_a;
  json report{{"law", {{"a_kelvin", fit.law.a_coeff}, {"beta", fit.law.beta}, {"t_bp_kelvin", fit.law.t_bp}}},
              {"sigma_a_kelvin", io::number_json(fit.sigma_a)},
              {"sigma_beta", io::number_json(fit.sigma_beta)},
              {"beta_status", config.free_beta ? "fitted" : "frozen"},
              {"low_confidence", fit.low_confidence},
              {"points_used", fit.points_used},
              {"per_device_a_kelvin", per_a},
              {"message", fit.message},
              {"counts", {{"ok", n_ok}, {"at_base", n_base}, {"out_of_range", out_of_range.size()}}},
              {"out_of_range", out_of_range},
              {"mode", config.thermometry_mode},
              {"config", config_to_json(config)}};
  io::write_json(out_dir / "self_heating.json", report);

  io::SvgPlot plot{"Effective temperature vs photon number", "n_bar", "T_eff (K)", true, true, {}};
  std::map<std::string, io::SvgSeries> series;
  double nlo = std::numeric_limits<double>::infinity(), nhi = -nlo;
  for (const auto& p : curve.points) {
    if (p.out_of_range) continue;
    auto& s = series[p.device_id];
    s.name = p.device_id;
    s.markers = true;
    s.x.push_back(p.n_bar);
    s.y.push_back(p.t_eff);
    nlo = std::min(nlo, p.n_bar);
    nhi = std::max(nhi, p.n_bar);
  }
  for (auto& [id, s] : series) plot.series.push_back(s);
  if (nhi > nlo) {
    io::SvgSeries law{"fit", inference::log_grid(nlo, nhi, 100), {}, false};
    for (double n : law.x) law.y.push_back(fit.law.t_eff(n, fit.law.t_bp));
    plot.series.push_back(law);
  }
  io::write_svg(out_dir / "self_heating.svg", plot);
  out.written = {(out_dir / "self_heating.csv").string(), (out_dir / "self_heating.json").string(),
                 (out_dir / "self_heating.svg").string()};
  return out;
}

// ---- ftir ------------------------------------------------------------------------------

namespace {

struct FtirRow {
  std::string label;
  double thickness_cm = 0.0;
  ftir::HydrogenResult h;
};

const ftir::PeakModel& peak_named(const std::vector<ftir::PeakModel>& peaks, const std::string& name) {
  for (const auto& p : peaks)
    if (p.name == name) return p;
  throw Error("no peak named " + name);
}

}  // namespace

CommandOutcome cmd_ftir(const RunConfig& config, std::ostream& log) {
  require_inputs(config);
  config.validate();
  ftir::HydrogenCalibration cal;
  auto calib = [&](const char* key, double fallback) {
    auto it = config.ftir_calibration.find(key);
    return it == config.ftir_calibration.end() ? fallback : it->second;
  };
  cal.sigma_sih = calib("sigma_sih_cm2", cal.sigma_sih);
  cal.sigma_nh = calib("sigma_nh_cm2", cal.sigma_nh);
  cal.matrix_density = calib("matrix_density_per_cm3", cal.matrix_density);
  cal.decadic_absorbance = config.ftir_decadic;
  ftir::PeakFitOptions popts;
  popts.window_half_width = config.tolerance("ftir_window_cm1", popts.window_half_width);
  popts.detection_sigmas = config.tolerance("ftir_detection_sigmas", popts.detection_sigmas);
  const int degree = static_cast<int>(config.tolerance("ftir_degree", 3));
  const auto seeds = ftir::default_seeds();

  const auto stems = output_stems(config.inputs);
  const fs::path out_dir = config.out_dir;
  const json cfg = config_to_json(config);
  std::vector<ItemLog> items(config.inputs.size());
  std::vector<std::optional<FtirRow>> rows(config.inputs.size());
  parallel_for(config.inputs.size(), config.jobs, [&](std::size_t i) {
    try {
      const auto s = io::read_spectrum(config.inputs[i]);
      const auto corrected =
          ftir::remove_baseline(s, degree, ftir::seed_windows(seeds, popts.window_half_width));
      const auto peaks = ftir::fit_peaks(corrected, seeds, popts);
      FtirRow row{s.label, s.thickness_cm,
                  ftir::hydrogen_content(peak_named(peaks, "Si-H"), peak_named(peaks, "N-H"), s.thickness_cm, cal)};
      json jp = json::array();
      for (const auto& p : peaks) jp.push_back(io::peak_to_json(p));
      json j{{"file", config.inputs[i].string()},
             {"label", s.label},
             {"thickness_cm", s.thickness_cm},
             {"peaks", jp},
             {"hydrogen", io::hydrogen_to_json(row.h)},
             {"config", cfg}};
      const auto jpath = out_dir / "ftir" / (stems[i] + ".json");
      const auto cpath = out_dir / "ftir" / (stems[i] + "_corrected.csv");
      io::write_json(jpath, j);
      io::write_spectrum(cpath, corrected);
      items[i].written = {jpath.string(), cpath.string()};
      items[i].ok = true;
      std::string notes;
      for (const auto& p : peaks) {
        if (p.upper_limit) notes += (notes.empty() ? "" : "; ") + p.name + " upper limit";
        if (!p.converged) notes += (notes.empty() ? "" : "; ") + p.name + " fit: " + p.message;
      }
      items[i].message = notes;
      rows[i] = row;
    } catch (const std::exception& e) {
      items[i].message = e.what();
    }
  });

  CommandOutcome out;
  json errors = json::array();
  report_items(config.inputs, items, log, out, errors);

  // Comparison across labels: one row per spectrum, a mean row per label and
  // a ratio row of the first label (as-deposited when present) to each other.
  io::CsvTable t;
  t.header = {"row", "file", "label", "thickness_cm", "n_sih_per_cm3", "n_nh_per_cm3", "atomic_h_percent",
              "sigma_percent", "upper_limit"};
  std::vector<std::string> labels;
  std::map<std::string, std::vector<const FtirRow*>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i]) continue;
    const auto& r = *rows[i];
    if (!groups.count(r.label)) labels.push_back(r.label);
    groups[r.label].push_back(&r);
    t.rows.push_back({"spectrum", config.inputs[i].string(), r.label, io::format_number(r.thickness_cm),
                      io::format_number(r.h.n_sih), io::format_number(r.h.n_nh),
                      io::format_number(r.h.atomic_h_percent), io::format_number(r.h.sigma_percent),
                      r.h.upper_limit ? "true" : "false"});
  }
  auto first = std::find(labels.begin(), labels.end(), "as-deposited");
  if (first != labels.end()) std::rotate(labels.begin(), first, first + 1);
  std::map<std::string, std::pair<double, double>> means;  // label -> (mean %H, sigma of mean)
  for (const auto& l : labels) {
    const auto& g = groups[l];
    double m = 0.0, v = 0.0, sih = 0.0, nh = 0.0;
    bool ul = false;
    for (auto* r : g) {
      m += r->h.atomic_h_percent;
      v += r->h.sigma_percent * r->h.sigma_percent;
      sih += r->h.n_sih;
      nh += r->h.n_nh;
      ul |= r->h.upper_limit;
    }
    const double k = static_cast<double>(g.size());
    means[l] = {m / k, std::sqrt(v) / k};
    t.rows.push_back({"mean", "", l, "", io::format_number(sih / k), io::format_number(nh / k),
                      io::format_number(m / k), io::format_number(std::sqrt(v) / k), ul ? "true" : "false"});
  }
  for (std::size_t i = 1; i < labels.size(); ++i) {
    const auto [a, sa] = means[labels[0]];
    const auto [b, sb] = means[labels[i]];
    const double r = a / b;
    const double sr = std::abs(r) * std::hypot(a != 0 ? sa / a : 0.0, b != 0 ? sb / b : 0.0);
    t.rows.push_back({"ratio", "", labels[0] + "/" + labels[i], "", "", "", io::format_number(r),
                      io::format_number(sr), groups[labels[i]].front()->h.upper_limit ? "true" : "false"});
  }
  io::write_csv(out_dir / "comparison.csv", t);
  out.written.push_back((out_dir / "comparison.csv").string());
  io::write_json(out_dir / "ftir_report.json",
                 json{{"inputs", config.inputs.size()},
                      {"analysed", config.inputs.size() - static_cast<std::size_t>(out.failures)},
                      {"failures", errors}, {"config", cfg}});
  out.written.push_back((out_dir / "ftir_report.json").string());
  return out;
}

// ---- simulate --------------------------------------------------------------------------

CommandOutcome cmd_simulate(const RunConfig& config, std::ostream& log) {
  config.validate(true);
  CommandOutcome out;
  for (const auto& p : simulate_bundle(config, config.out_dir)) out.written.push_back(p.string());
  log << "wrote " << out.written.size() << " files to " << config.out_dir.string() << "\n";
  return out;
}

// ---- command line ----------------------------------------------------------------------

namespace {

tlsmodel::ModelTerms disable_terms(tlsmodel::ModelTerms t, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (n == "background") t.background = false;
    else if (n == "resonant") t.resonant = false;
    else if (n == "relaxation") t.relaxation = false;
    else if (n == "quasiparticle") t.quasiparticle = false;
    else if (n == "self-heating" || n == "self_heating") t.self_heating = false;
    else throw SchemaError("disable", "unknown term '" + n + "'");
  }
  return t;
}

std::pair<std::string, double> parse_freeze(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw SchemaError("freeze", "expected name=value, got '" + s + "'");
  return {s.substr(0, eq), io::parse_number(s.substr(eq + 1), "freeze." + s.substr(0, eq))};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"TLS loss analysis: resonator fits, loss-model fits, thermometry, FT-IR hydrogen content and "
               "synthetic data generation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  app.add_option("--config", config_path, "RunConfig JSON file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Seed for synthesis");
  app.add_option("--jobs", jobs, "Worker threads (0 = hardware)");

  std::vector<std::string> files;
  bool no_normalize = false;
  auto* s21 = app.add_subcommand("fit-s21", "Fit the notch model to S21 sweeps");
  s21->add_option("files", files, "Sweep CSV files (sidecar JSON next to each)");
  s21->add_flag("--no-normalize", no_normalize, "Skip baseline normalization");

  std::string power, temperature, devices, film, mode;
  std::vector<std::string> disable, freeze;
  bool free_beta = false;
  std::optional<int> dim;
  std::optional<double> t0;
  auto* loss = app.add_subcommand("fit-loss", "Joint fit of the loss model to power and temperature sweeps");
  loss->add_option("--power", power, "Power-sweep loss CSV");
  loss->add_option("--temperature", temperature, "Temperature-sweep loss CSV");
  loss->add_option("--devices", devices, "Device table JSON (default: devices.json next to --power)");
  loss->add_option("--disable", disable, "Terms to disable: background resonant relaxation quasiparticle self-heating");
  loss->add_option("--freeze", freeze, "Hold a parameter fixed: name=value");
  loss->add_flag("--free-beta", free_beta, "Fit the self-heating exponent");
  loss->add_option("--dim", dim, "Phonon-bath dimensionality (1, 2 or 3)");
  loss->add_option("--t0", t0, "Reference temperature of the relaxation loss tangent (K)");

  auto* thermo = app.add_subcommand("thermometry", "Infer effective temperatures and fit the self-heating law");
  thermo->add_option("--power", power, "Power-sweep loss CSV");
  thermo->add_option("--devices", devices, "Device table JSON (default: devices.json next to --power)");
  thermo->add_option("--film", film, "Film model JSON (film_fit.json or a fit-loss report)");
  thermo->add_option("--mode", mode, "shared | per-device");
  thermo->add_flag("--free-beta", free_beta, "Fit the self-heating exponent");

  bool natural = false;
  auto* ir = app.add_subcommand("ftir", "Hydrogen content from FT-IR spectra");
  ir->add_option("files", files, "Spectrum CSV files (sidecar JSON next to each)");
  ir->add_flag("--natural-absorbance", natural, "Absorbance is natural-log (no ln 10 factor)");

  std::vector<std::string> films;
  auto* sim = app.add_subcommand("simulate", "Write a deterministic synthetic dataset bundle");
  sim->add_option("--film", films, "Films to generate: as-deposited annealed");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!out_dir.empty()) c.out_dir = out_dir;
    if (seed) c.seed = *seed;
    if (jobs) c.jobs = *jobs;
    if (!files.empty()) c.inputs.assign(files.begin(), files.end());
    if (!power.empty()) c.power_csv = power;
    if (!temperature.empty()) c.temperature_csv = temperature;
    if (!devices.empty()) c.devices_json = devices;
    if (!film.empty()) c.film_json = film;
    if (!mode.empty()) c.thermometry_mode = mode;
    if (free_beta) c.free_beta = true;
    if (no_normalize) c.normalize_sweeps = false;
    if (natural) c.ftir_decadic = false;
    if (dim) c.d = *dim;
    if (t0) c.t0_kelvin = *t0;
    c.terms = disable_terms(c.terms, disable);
    for (const auto& f : freeze) c.frozen.insert_or_assign(parse_freeze(f).first, parse_freeze(f).second);
    if (!films.empty()) c.scenario.films = films;

    CommandOutcome res;
    if (app.got_subcommand(s21)) res = cmd_fit_s21(c, err);
    else if (app.got_subcommand(loss)) res = cmd_fit_loss(c, err);
    else if (app.got_subcommand(thermo)) res = cmd_thermometry(c, err);
    else if (app.got_subcommand(ir)) res = cmd_ftir(c, err);
    else res = cmd_simulate(c, err);
    for (const auto& w : res.written) out << w << "\n";
    if (res.failures > 0) {
      err << res.failures << " item(s) failed\n";
      return kExitItemFailures;
    }
    return kExitOk;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitItemFailures;
  }
}

}  // namespace tlsloss::cli
