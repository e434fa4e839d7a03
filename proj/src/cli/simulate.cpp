#include "tlsloss/cli/simulate.hpp"

#include <cmath>

#include "tlsloss/error.hpp"
#include "tlsloss/inference/synthetic.hpp"
#include "tlsloss/io/csv.hpp"
#include "tlsloss/io/formats.hpp"
#include "tlsloss/response/sweep.hpp"

namespace tlsloss::cli {

namespace {

// Sub-seed tags, per film: tag = 64 * film_index + stream.
enum Stream : std::uint64_t { kPowerStream = 1, kTempStream = 2, kSweepStream = 8, kFtirStream = 32 };

std::uint64_t film_index(const std::string& film) { return film == "annealed" ? 1 : 0; }

std::string thickness_tag(double nm) {
  const double r = std::round(nm);
  return "t" + (r == nm ? std::to_string(static_cast<long long>(r)) : io::format_number(nm)) + "nm";
}

}  // namespace

ftir::SpectrumSpec ftir_spec(const std::string& film, double thickness_nm, const Scenario& sc, std::uint64_t seed) {
  const double scale = (thickness_nm / 500.0) / (film == "annealed" ? sc.annealed_area_ratio : 1.0);
  ftir::SpectrumSpec spec;
  spec.grid = ftir::uniform_grid(400.0, 4500.0, 2.0);
  spec.lines = {{3330.0, 60.0, 0.02 * scale}, {2210.0, 50.0, 0.01 * scale}};
  spec.baseline = {0.05, 0.01, -0.004, 0.001};
  spec.noise_sigma = sc.ftir_noise;
  spec.seed = seed;
  spec.thickness_cm = thickness_nm * 1e-7;
  spec.label = film;
  return spec;
}

Preset scenario_preset(const std::string& film, const Scenario& sc, std::uint64_t seed) {
  Preset p = preset_by_name(film);
  const std::uint64_t base = 64 * film_index(film);
  p.power_noise.seed = derive_seed(seed, base + kPowerStream);
  p.temp_noise.seed = derive_seed(seed, base + kTempStream);
  if (sc.power_noise_relative) p.power_noise.relative = *sc.power_noise_relative;
  if (sc.temp_noise_relative) p.temp_noise.relative = *sc.temp_noise_relative;
  if (sc.temp_noise_absolute) p.temp_noise.absolute = *sc.temp_noise_absolute;
  return p;
}

std::vector<std::filesystem::path> simulate_bundle(const RunConfig& config, const std::filesystem::path& out) {
  const Scenario& sc = config.scenario;
  sc.validate();
  if (!config.seed) throw SchemaError("seed", "required for synthesis");
  const std::uint64_t seed = *config.seed;

  std::vector<std::filesystem::path> written;
  auto json_file = [&](const std::filesystem::path& p, const io::json& j) {
    io::write_json(p, j);
    written.push_back(p);
  };

  json_file(out / "scenario.json", io::json{{"seed", seed}, {"scenario", scenario_to_json(sc)}});

  for (const auto& film : sc.films) {
    const Preset p = scenario_preset(film, sc, seed);
    const auto dir = out / film;
    inference::RelaxationCache cache(p.film.kernel);
    std::vector<double> f0s;
    for (const auto& d : p.devices) f0s.push_back(d.f0);
    cache.prefetch(f0s, config.jobs);

    io::write_device_table(dir / "devices.json", p.devices);
    written.push_back(dir / "devices.json");
    const auto power = inference::synth_power_sweep(p.film, p.devices, p.power_n_grid, p.t_bp, p.power_noise, cache);
    io::write_loss_dataset(dir / "power.csv", power);
    written.push_back(dir / "power.csv");
    const auto temp =
        inference::synth_temperature_sweep(p.film, p.devices, p.temp_grid, p.temp_n_bar, p.temp_noise, cache);
    io::write_loss_dataset(dir / "temperature.csv", temp);
    written.push_back(dir / "temperature.csv");
    json_file(dir / "film.json", io::film_to_json(p.film));
    json_file(dir / "model_card.json", io::model_card(p.film, p.provenance));

    // One S21 sweep per device at the base temperature and the scenario's
    // photon number; the drive power is the one that yields that photon number.
    for (std::size_t i = 0; i < p.devices.size(); ++i) {
      const auto& dev = p.devices[i];
      const double q_int_inv = p.film.loss(dev, sc.sweep_n_bar, p.t_bp, &cache.get(dev.f0)).total;
      const auto res = response::make_resonator(dev.f0, q_int_inv, dev.q_ext_inv, dev.phi);
      response::SweepMeta meta;
      meta.device_id = dev.id;
      meta.base_temp = p.t_bp;
      meta.drive_detuning = sc.sweep_detuning_hz;
      meta.drive_power_incident = response::incident_power_for(res, sc.sweep_n_bar, sc.sweep_detuning_hz);
      const response::NoiseSpec noise{sc.sweep_sigma_iq, derive_seed(seed, 64 * film_index(film) + kSweepStream + i)};
      const auto sweep = response::synth_sweep(
          res, response::default_grid(res, sc.sweep_linewidths, sc.sweep_points), noise, meta);
      const auto path = dir / "sweeps" / (dev.id + ".csv");
      io::write_sweep(path, sweep);
      written.push_back(path);
    }

    for (std::size_t i = 0; i < sc.thicknesses_nm.size(); ++i) {
      const double t = sc.thicknesses_nm[i];
      const auto spec = ftir_spec(film, t, sc, derive_seed(seed, 64 * film_index(film) + kFtirStream + i));
      const auto path = dir / "ftir" / (thickness_tag(t) + ".csv");
      io::write_spectrum(path, ftir::synth_spectrum(spec));
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace tlsloss::cli
