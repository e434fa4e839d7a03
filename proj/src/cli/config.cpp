#include "tlsloss/cli/config.hpp"

#include <set>

#include "tlsloss/error.hpp"
#include "tlsloss/io/formats.hpp"

namespace tlsloss::cli {

using nlohmann::json;

void Scenario::validate() const {
  if (films.empty()) throw SchemaError("scenario.films", "need at least one film");
  for (const auto& f : films)
    if (f != "as-deposited" && f != "annealed")
      throw SchemaError("scenario.films", "unknown film '" + f + "' (expected as-deposited or annealed)");
  if (sweep_points < 16) throw SchemaError("scenario.sweep_points", "need at least 16 points");
  if (!(sweep_linewidths > 0.0)) throw SchemaError("scenario.sweep_linewidths", "must be > 0");
  if (!(sweep_sigma_iq >= 0.0)) throw SchemaError("scenario.sweep_sigma_iq", "must be >= 0");
  if (!(sweep_n_bar > 0.0)) throw SchemaError("scenario.sweep_n_bar", "must be > 0");
  if (!(sweep_detuning_hz != 0.0)) throw SchemaError("scenario.sweep_detuning_hz", "must be non-zero");
  auto nonneg = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v >= 0.0)) throw SchemaError(name, "must be >= 0");
  };
  nonneg(power_noise_relative, "scenario.power_noise_relative");
  nonneg(temp_noise_relative, "scenario.temp_noise_relative");
  nonneg(temp_noise_absolute, "scenario.temp_noise_absolute");
  if (thicknesses_nm.empty()) throw SchemaError("scenario.thicknesses_nm", "need at least one thickness");
  for (double t : thicknesses_nm)
    if (!(t > 0.0)) throw SchemaError("scenario.thicknesses_nm", "thickness must be > 0");
  if (!(ftir_noise >= 0.0)) throw SchemaError("scenario.ftir_noise", "must be >= 0");
  if (!(annealed_area_ratio > 0.0)) throw SchemaError("scenario.annealed_area_ratio", "must be > 0");
}

double RunConfig::tolerance(const std::string& name, double fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

void RunConfig::validate(bool needs_seed) const {
  auto exists = [](const fs::path& p, const std::string& field) {
    if (!fs::exists(p)) throw SchemaError(field, "path does not exist: " + p.string());
  };
  for (const auto& p : inputs) exists(p, "inputs");
  if (power_csv) exists(*power_csv, "power_csv");
  if (temperature_csv) exists(*temperature_csv, "temperature_csv");
  if (devices_json) exists(*devices_json, "devices_json");
  if (film_json) exists(*film_json, "film_json");
  if (needs_seed && !seed) throw SchemaError("seed", "required for synthesis");
  if (jobs < 0) throw SchemaError("jobs", "must be >= 0");
  if (d < 1 || d > 3) throw SchemaError("d", "must be 1, 2 or 3");
  if (thermometry_mode != "shared" && thermometry_mode != "per-device")
    throw SchemaError("thermometry_mode", "expected shared or per-device");
  static const std::set<std::string> known_tol{"thermometry_t_hi_kelvin", "detection_sigmas", "ftir_detection_sigmas",
                                               "ftir_window_cm1", "ftir_degree", "min_decades",
                                               "heat_gate_sigmas"};
  for (const auto& [k, v] : tolerances)
    if (!known_tol.count(k)) throw SchemaError("tolerances." + k, "unknown tolerance");
  static const std::set<std::string> known_cal{"sigma_sih_cm2", "sigma_nh_cm2", "matrix_density_per_cm3"};
  for (const auto& [k, v] : ftir_calibration) {
    if (!known_cal.count(k)) throw SchemaError("ftir_calibration." + k, "unknown constant");
    if (!(v > 0.0)) throw SchemaError("ftir_calibration." + k, "must be > 0");
  }
  scenario.validate();
}

json scenario_to_json(const Scenario& s) {
  json j{{"films", s.films},
         {"sweep_points", s.sweep_points},
         {"sweep_linewidths", s.sweep_linewidths},
         {"sweep_sigma_iq", s.sweep_sigma_iq},
         {"sweep_n_bar", s.sweep_n_bar},
         {"sweep_detuning_hz", s.sweep_detuning_hz},
         {"thicknesses_nm", s.thicknesses_nm},
         {"ftir_noise", s.ftir_noise},
         {"annealed_area_ratio", s.annealed_area_ratio}};
  j["power_noise_relative"] = s.power_noise_relative ? json(*s.power_noise_relative) : json(nullptr);
  j["temp_noise_relative"] = s.temp_noise_relative ? json(*s.temp_noise_relative) : json(nullptr);
  j["temp_noise_absolute"] = s.temp_noise_absolute ? json(*s.temp_noise_absolute) : json(nullptr);
  return j;
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix) {
  if (!j.is_object()) throw SchemaError(prefix.empty() ? "config" : prefix, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw SchemaError(prefix + k, "unknown key");
}

std::optional<double> opt_number(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return io::json_number_at(j, key);
}

template <class T>
T get_as(const json& j, const std::string& key, const std::string& field) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(field, "wrong type");
  }
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  reject_unknown(j, {"films", "sweep_points", "sweep_linewidths", "sweep_sigma_iq", "sweep_n_bar", "sweep_detuning_hz",
                     "power_noise_relative", "temp_noise_relative", "temp_noise_absolute", "thicknesses_nm",
                     "ftir_noise", "annealed_area_ratio"},
                 "scenario.");
  Scenario s;
  if (j.contains("films")) s.films = get_as<std::vector<std::string>>(j, "films", "scenario.films");
  if (j.contains("sweep_points")) s.sweep_points = get_as<int>(j, "sweep_points", "scenario.sweep_points");
  if (j.contains("sweep_linewidths")) s.sweep_linewidths = io::json_number_at(j, "sweep_linewidths");
  if (j.contains("sweep_sigma_iq")) s.sweep_sigma_iq = io::json_number_at(j, "sweep_sigma_iq");
  if (j.contains("sweep_n_bar")) s.sweep_n_bar = io::json_number_at(j, "sweep_n_bar");
  if (j.contains("sweep_detuning_hz")) s.sweep_detuning_hz = io::json_number_at(j, "sweep_detuning_hz");
  s.power_noise_relative = opt_number(j, "power_noise_relative");
  s.temp_noise_relative = opt_number(j, "temp_noise_relative");
  s.temp_noise_absolute = opt_number(j, "temp_noise_absolute");
  if (j.contains("thicknesses_nm"))
    s.thicknesses_nm = get_as<std::vector<double>>(j, "thicknesses_nm", "scenario.thicknesses_nm");
  if (j.contains("ftir_noise")) s.ftir_noise = io::json_number_at(j, "ftir_noise");
  if (j.contains("annealed_area_ratio")) s.annealed_area_ratio = io::json_number_at(j, "annealed_area_ratio");
  s.validate();
  return s;
}

json config_to_json(const RunConfig& c) {
  auto path_or_null = [](const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); };
  std::vector<std::string> inputs;
  for (const auto& p : c.inputs) inputs.push_back(p.string());
  return json{{"inputs", inputs},
              {"power_csv", path_or_null(c.power_csv)},
              {"temperature_csv", path_or_null(c.temperature_csv)},
              {"devices_json", path_or_null(c.devices_json)},
              {"film_json", path_or_null(c.film_json)},
              {"terms", io::terms_to_json(c.terms)},
              {"frozen", c.frozen},
              {"free_beta", c.free_beta},
              {"d", c.d},
              {"t0_kelvin", c.t0_kelvin},
              {"out_dir", c.out_dir.string()},
              {"seed", c.seed ? json(*c.seed) : json(nullptr)},
              {"jobs", c.jobs},
              {"normalize_sweeps", c.normalize_sweeps},
              {"thermometry_mode", c.thermometry_mode},
              {"tolerances", c.tolerances},
              {"ftir_calibration", c.ftir_calibration},
              {"ftir_decadic", c.ftir_decadic},
              {"scenario", scenario_to_json(c.scenario)}};
}

RunConfig config_from_json(const json& j) {
  reject_unknown(j, {"inputs", "power_csv", "temperature_csv", "devices_json", "film_json", "terms", "frozen",
                     "free_beta", "d", "t0_kelvin", "out_dir", "seed", "jobs", "normalize_sweeps", "thermometry_mode",
                     "tolerances", "ftir_calibration", "ftir_decadic", "scenario"},
                 "");
  RunConfig c;
  auto opt_path = [&](const char* key) -> std::optional<fs::path> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return fs::path(get_as<std::string>(j, key, key));
  };
  if (j.contains("inputs"))
    for (const auto& p : get_as<std::vector<std::string>>(j, "inputs", "inputs")) c.inputs.emplace_back(p);
  c.power_csv = opt_path("power_csv");
  c.temperature_csv = opt_path("temperature_csv");
  c.devices_json = opt_path("devices_json");
  c.film_json = opt_path("film_json");
  if (j.contains("terms")) c.terms = io::terms_from_json(j.at("terms"));
  if (j.contains("frozen")) c.frozen = get_as<std::map<std::string, double>>(j, "frozen", "frozen");
  if (j.contains("free_beta")) c.free_beta = get_as<bool>(j, "free_beta", "free_beta");
  if (j.contains("d")) c.d = get_as<int>(j, "d", "d");
  if (j.contains("t0_kelvin")) c.t0_kelvin = io::json_number_at(j, "t0_kelvin");
  if (j.contains("out_dir")) c.out_dir = get_as<std::string>(j, "out_dir", "out_dir");
  if (j.contains("seed") && !j.at("seed").is_null()) c.seed = get_as<std::uint64_t>(j, "seed", "seed");
  if (j.contains("jobs")) c.jobs = get_as<int>(j, "jobs", "jobs");
  if (j.contains("normalize_sweeps")) c.normalize_sweeps = get_as<bool>(j, "normalize_sweeps", "normalize_sweeps");
  if (j.contains("thermometry_mode")) c.thermometry_mode = get_as<std::string>(j, "thermometry_mode", "thermometry_mode");
  if (j.contains("tolerances")) c.tolerances = get_as<std::map<std::string, double>>(j, "tolerances", "tolerances");
  if (j.contains("ftir_calibration"))
    c.ftir_calibration = get_as<std::map<std::string, double>>(j, "ftir_calibration", "ftir_calibration");
  if (j.contains("ftir_decadic")) c.ftir_decadic = get_as<bool>(j, "ftir_decadic", "ftir_decadic");
  if (j.contains("scenario")) c.scenario = scenario_from_json(j.at("scenario"));
  return c;
}

RunConfig load_config(const fs::path& path) { return config_from_json(io::read_json(path)); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finaliser over the combined value
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace tlsloss::cli
