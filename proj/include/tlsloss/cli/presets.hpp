#pragma once

#include <map>
#include <string>
#include <vector>

#include "tlsloss/inference/synthetic.hpp"
#include "tlsloss/tlsmodel/device_model.hpp"

namespace tlsloss::cli {

// A complete synthetic experiment on one film: generator parameters, the
// five-resonator chip, measurement grids and noise.
struct Preset {
  std::string name;
  tlsmodel::FilmParams film;
  std::vector<tlsmodel::Device> devices;
  double t_bp = 0.01;                   // K, base plate during power sweeps
  std::vector<double> power_n_grid;     // photon numbers of the power sweep
  std::vector<double> temp_grid;        // K, temperature sweep
  double temp_n_bar = 1.0;              // photon number during the temperature sweep
  inference::LossNoise power_noise;
  inference::LossNoise temp_noise;
  std::map<std::string, std::string> provenance;  // parameter -> where its value comes from
};

// Participation of the film in each of the five resonators A-E.
const std::vector<double>& preset_f_sin();

Preset as_deposited_preset();
Preset annealed_preset();
// "as-deposited" or "annealed"; throws SchemaError otherwise.
Preset preset_by_name(const std::string& name);

}  // namespace tlsloss::cli
