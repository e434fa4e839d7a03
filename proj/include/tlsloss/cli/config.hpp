#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlsloss/tlsmodel/params.hpp"

namespace tlsloss::cli {

namespace fs = std::filesystem;

// What `simulate` generates.
struct Scenario {
  std::vector<std::string> films{"as-deposited", "annealed"};
  // S21 sweeps, one per device, at the preset base temperature.
  int sweep_points = 401;
  double sweep_linewidths = 20.0;
  double sweep_sigma_iq = 1e-3;
  double sweep_n_bar = 1.0;             // sets the recorded drive power
  double sweep_detuning_hz = 1.5e6;
  // Loss-data noise; unset keeps the preset values.
  std::optional<double> power_noise_relative;
  std::optional<double> temp_noise_relative;
  std::optional<double> temp_noise_absolute;
  // FT-IR spectra: one per thickness, lines scaled with thickness.
  std::vector<double> thicknesses_nm{500.0, 600.0, 700.0, 800.0};
  double ftir_noise = 1e-4;             // absorbance
  double annealed_area_ratio = 20.0;    // as-deposited / annealed line areas

  void validate() const;
};

// Everything needed to rerun an analysis; embedded verbatim in every report.
struct RunConfig {
  std::vector<fs::path> inputs;         // sweep or spectrum files
  std::optional<fs::path> power_csv;
  std::optional<fs::path> temperature_csv;
  std::optional<fs::path> devices_json;
  std::optional<fs::path> film_json;    // fitted film for thermometry
  tlsmodel::ModelTerms terms{};
  std::map<std::string, double> frozen;
  bool free_beta = false;
  int d = 2;
  double t0_kelvin = 0.5;
  fs::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  bool normalize_sweeps = true;
  std::string thermometry_mode = "shared";  // shared | per-device
  // Tolerance overrides, by name: thermometry_t_hi_kelvin,
  // detection_sigmas, ftir_detection_sigmas, ftir_window_cm1, ftir_degree,
  // min_decades, heat_gate_sigmas.
  std::map<std::string, double> tolerances;
  // FT-IR calibration overrides: sigma_sih_cm2, sigma_nh_cm2, matrix_density_per_cm3.
  std::map<std::string, double> ftir_calibration;
  bool ftir_decadic = true;
  Scenario scenario;

  double tolerance(const std::string& name, double fallback) const;
  // Checks that referenced paths exist; `needs_seed` for synthesis.
  void validate(bool needs_seed = false) const;
};

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
// Unknown keys are rejected (SchemaError names them).
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const fs::path& path);

// Independent, well-mixed sub-seed for stream `tag` of a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace tlsloss::cli
