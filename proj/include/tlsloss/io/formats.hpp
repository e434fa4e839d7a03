#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlsloss/ftir/hydrogen.hpp"
#include "tlsloss/ftir/spectrum.hpp"
#include "tlsloss/inference/loss_fit.hpp"
#include "tlsloss/inference/thermometry.hpp"
#include "tlsloss/response/fit.hpp"
#include "tlsloss/response/sweep.hpp"
#include "tlsloss/tlsmodel/device_model.hpp"

// Readers and writers for every file format of the project. All units are SI
// except wavenumbers (cm^-1) and film thickness (cm); column and key names
// carry the unit suffix. Readers throw SchemaError naming the field.
namespace tlsloss::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

// NaN is written as null and read back as NaN.
json number_json(double v);
double json_number(const json& j, const std::string& field);
double json_number_at(const json& obj, const std::string& key);  // required key
std::string json_string_at(const json& obj, const std::string& key);
json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);

// The JSON sidecar next to a CSV: same stem, extension .json.
fs::path sidecar_path(const fs::path& csv);

// Sweep: CSV freq_hz,re_s21,im_s21 + sidecar {device_id, p_inc_watt, detuning_hz, t_bp_kelvin}.
response::FrequencySweep read_sweep(const fs::path& csv);
void write_sweep(const fs::path& csv, const response::FrequencySweep& sweep);
json s21_fit_to_json(const response::S21Fit& fit, const std::string& device_id);
response::S21Fit s21_fit_from_json(const json& j);

// Device table: {device_id: {f0_hz, f_sin, q_ext_inv[, phi_rad]}}.
using DeviceTable = std::map<std::string, tlsmodel::Device>;
DeviceTable device_table_from_json(const json& j);
json device_table_to_json(const DeviceTable& t);
DeviceTable read_device_table(const fs::path& path);
void write_device_table(const fs::path& path, const std::vector<tlsmodel::Device>& devices);

// Loss data: CSV device_id,n_bar,t_bp_kelvin,qi_inv,qi_inv_sigma; f_sin and f0
// come from the device table.
inference::LossDataset read_loss_dataset(const fs::path& csv, const DeviceTable& devices, inference::SweepKind kind);
void write_loss_dataset(const fs::path& csv, const inference::LossDataset& ds);

// Thermometry: CSV n_bar,t_eff_kelvin,t_eff_sigma,device_id,t_bp_kelvin,status
// with status one of ok | at_base | out_of_range.
void write_self_heating_csv(const fs::path& csv, const inference::SelfHeatingCurve& curve);
inference::SelfHeatingCurve read_self_heating_csv(const fs::path& csv);

// Spectrum: CSV wavenumber_cm1,absorbance + sidecar {thickness_cm, label}.
ftir::IrSpectrum read_spectrum(const fs::path& csv);
void write_spectrum(const fs::path& csv, const ftir::IrSpectrum& s);
json peak_to_json(const ftir::PeakModel& p);
json hydrogen_to_json(const ftir::HydrogenResult& h);

// Film model parameters with unit-suffixed keys.
json film_to_json(const tlsmodel::FilmParams& f);
tlsmodel::FilmParams film_from_json(const json& j);
json terms_to_json(const tlsmodel::ModelTerms& t);
tlsmodel::ModelTerms terms_from_json(const json& j, tlsmodel::ModelTerms defaults = {});

// Every parameter of the film with value, unit and provenance.
json model_card(const tlsmodel::FilmParams& f, const std::map<std::string, std::string>& provenance);

}  // namespace tlsloss::io
