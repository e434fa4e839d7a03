#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tlsloss/cli/config.hpp"
#include "tlsloss/cli/presets.hpp"
#include "tlsloss/ftir/spectrum.hpp"

namespace tlsloss::cli {

// FT-IR generator for one film and thickness: N-H and Si-H lines whose
// amplitudes scale with thickness, a gentle cubic baseline and white noise.
ftir::SpectrumSpec ftir_spec(const std::string& film, double thickness_nm, const Scenario& sc, std::uint64_t seed);

// Preset for `film` with the scenario's noise overrides and seeds derived
// from the run seed.
Preset scenario_preset(const std::string& film, const Scenario& sc, std::uint64_t seed);

// Write the synthetic bundle for every film of the scenario under `out`:
//   scenario.json
//   <film>/devices.json, power.csv, temperature.csv, film.json, model_card.json
//   <film>/sweeps/<device>.csv (+ .json sidecar)
//   <film>/ftir/t<nm>nm.csv (+ .json sidecar)
// The scenario is validated before anything is written. Returns the written
// files in writing order.
std::vector<std::filesystem::path> simulate_bundle(const RunConfig& config, const std::filesystem::path& out);

}  // namespace tlsloss::cli
