#include "tlsloss/io/formats.hpp"

#include <cmath>
#include <limits>

#include "tlsloss/error.hpp"
#include "tlsloss/io/csv.hpp"

namespace tlsloss::io {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

CsvTable table(std::vector<std::string> header) {
  CsvTable t;
  t.header = std::move(header);
  return t;
}

}  // namespace

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double json_number(const json& j, const std::string& field) {
  if (j.is_null()) return kNaN;
  if (!j.is_number()) throw SchemaError(field, "expected a number");
  return j.get<double>();
}

double json_number_at(const json& obj, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(key, "required key missing");
  return json_number(obj.at(key), key);
}

std::string json_string_at(const json& obj, const std::string& key) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(key, "required key missing");
  if (!obj.at(key).is_string()) throw SchemaError(key, "expected a string");
  return obj.at(key).get<std::string>();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw SchemaError("json", path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path sidecar_path(const fs::path& csv) {
  auto p = csv;
  p.replace_extension(".json");
  return p;
}

// ---- sweeps -----------------------------------------------------------------

response::FrequencySweep read_sweep(const fs::path& csv) {
  const auto t = read_csv(csv);
  const auto cf = t.column("freq_hz"), cr = t.column("re_s21"), ci = t.column("im_s21");
  response::FrequencySweep s;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    s.freqs.push_back(t.number(r, cf));
    s.s21.emplace_back(t.number(r, cr), t.number(r, ci));
  }
  const auto side_path = sidecar_path(csv);
  if (!fs::exists(side_path)) throw SchemaError("sidecar", "missing " + side_path.string());
  const auto side = read_json(side_path);
  s.device_id = json_string_at(side, "device_id");
  s.drive_power_incident = json_number_at(side, "p_inc_watt");
  s.drive_detuning = json_number_at(side, "detuning_hz");
  s.base_temp = json_number_at(side, "t_bp_kelvin");
  s.validate();
  return s;
}

void write_sweep(const fs::path& csv, const response::FrequencySweep& s) {
  s.validate();
  auto t = table({"freq_hz", "re_s21", "im_s21"});
  for (std::size_t i = 0; i < s.size(); ++i)
    t.rows.push_back({format_number(s.freqs[i]), format_number(s.s21[i].real()), format_number(s.s21[i].imag())});
  write_csv(csv, t);
  write_json(sidecar_path(csv), json{{"device_id", s.device_id},
                                     {"p_inc_watt", s.drive_power_incident},
                                     {"detuning_hz", s.drive_detuning},
                                     {"t_bp_kelvin", s.base_temp}});
}

json s21_fit_to_json(const response::S21Fit& fit, const std::string& device_id) {
  const auto& p = fit.params;
  return json{{"device_id", device_id},
              {"f0_hz", p.f0},
              {"q_total_inv", p.q_total_inv},
              {"q_ext_inv_mag", p.q_ext_inv_mag},
              {"phi_rad", p.phi},
              {"q_int_inv", p.q_int_inv},
              {"sigmas",
               {{"f0_hz", number_json(p.sigmas.f0)},
                {"q_total_inv", number_json(p.sigmas.q_total_inv)},
                {"q_ext_inv_mag", number_json(p.sigmas.q_ext_inv_mag)},
                {"phi_rad", number_json(p.sigmas.phi)},
                {"q_int_inv", number_json(p.sigmas.q_int_inv)}}},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"residual_rms", number_json(fit.residual_rms)},
              {"noise_estimate", number_json(fit.noise_estimate)},
              {"message", fit.message}};
}

response::S21Fit s21_fit_from_json(const json& j) {
  response::S21Fit f;
  auto& p = f.params;
  p.f0 = json_number_at(j, "f0_hz");
  p.q_total_inv = json_number_at(j, "q_total_inv");
  p.q_ext_inv_mag = json_number_at(j, "q_ext_inv_mag");
  p.phi = json_number_at(j, "phi_rad");
  p.q_int_inv = json_number_at(j, "q_int_inv");
  const auto& s = j.at("sigmas");
  p.sigmas.f0 = json_number_at(s, "f0_hz");
  p.sigmas.q_total_inv = json_number_at(s, "q_total_inv");
  p.sigmas.q_ext_inv_mag = json_number_at(s, "q_ext_inv_mag");
  p.sigmas.phi = json_number_at(s, "phi_rad");
  p.sigmas.q_int_inv = json_number_at(s, "q_int_inv");
  f.converged = j.value("converged", false);
  f.iterations = j.value("iterations", 0);
  f.residual_rms = json_number_at(j, "residual_rms");
  f.noise_estimate = json_number_at(j, "noise_estimate");
  f.message = j.value("message", "");
  return f;
}

// ---- devices and loss data ----------------------------------------------------

DeviceTable device_table_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("devices", "expected an object keyed by device id");
  DeviceTable t;
  for (const auto& [id, v] : j.items()) {
    tlsmodel::Device d;
    d.id = id;
    d.f0 = json_number_at(v, "f0_hz");
    d.f_sin = json_number_at(v, "f_sin");
    d.q_ext_inv = json_number_at(v, "q_ext_inv");
    d.phi = v.contains("phi_rad") ? json_number_at(v, "phi_rad") : 0.0;
    if (!(d.f0 > 0.0)) throw SchemaError("f0_hz", "device " + id + ": must be > 0");
    if (!(d.f_sin >= 0.0 && d.f_sin <= 1.0)) throw SchemaError("f_sin", "device " + id + ": must lie in [0, 1]");
    if (!(d.q_ext_inv > 0.0)) throw SchemaError("q_ext_inv", "device " + id + ": must be > 0");
    t[id] = d;
  }
  return t;
}

json device_table_to_json(const DeviceTable& t) {
  json j = json::object();
  for (const auto& [id, d] : t)
    j[id] = {{"f0_hz", d.f0}, {"f_sin", d.f_sin}, {"q_ext_inv", d.q_ext_inv}, {"phi_rad", d.phi}};
  return j;
}

DeviceTable read_device_table(const fs::path& path) { return device_table_from_json(read_json(path)); }

void write_device_table(const fs::path& path, const std::vector<tlsmodel::Device>& devices) {
  DeviceTable t;
  for (const auto& d : devices) t[d.id] = d;
  write_json(path, device_table_to_json(t));
}

inference::LossDataset read_loss_dataset(const fs::path& csv, const DeviceTable& devices, inference::SweepKind kind) {
  const auto t = read_csv(csv);
  const auto cd = t.column("device_id"), cn = t.column("n_bar"), ct = t.column("t_bp_kelvin"),
             cq = t.column("qi_inv"), cs = t.column("qi_inv_sigma");
  inference::LossDataset ds;
  ds.kind = kind;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    inference::LossPoint p;
    p.device_id = t.cell(r, cd);
    auto it = devices.find(p.device_id);
    if (it == devices.end())
      throw SchemaError("device_id", csv.string() + " row " + std::to_string(r + 1) + ": device '" + p.device_id +
                                         "' not in the device table");
    p.n_bar = t.number(r, cn);
    p.t_bp = t.number(r, ct);
    p.q_int_inv = t.number(r, cq);
    p.sigma = t.number(r, cs);
    p.f_sin = it->second.f_sin;
    p.f0 = it->second.f0;
    ds.points.push_back(p);
  }
  ds.validate();
  return ds;
}

void write_loss_dataset(const fs::path& csv, const inference::LossDataset& ds) {
  ds.validate();
  auto t = table({"device_id", "n_bar", "t_bp_kelvin", "qi_inv", "qi_inv_sigma"});
  for (const auto& p : ds.points)
    t.rows.push_back({p.device_id, format_number(p.n_bar), format_number(p.t_bp), format_number(p.q_int_inv),
                      format_number(p.sigma)});
  write_csv(csv, t);
}

// ---- thermometry ----------------------------------------------------------------

void write_self_heating_csv(const fs::path& csv, const inference::SelfHeatingCurve& curve) {
  auto t = table({"n_bar", "t_eff_kelvin", "t_eff_sigma", "device_id", "t_bp_kelvin", "status"});
  for (const auto& p : curve.points)
    t.rows.push_back({format_number(p.n_bar), format_number(p.t_eff), format_number(p.sigma_t), p.device_id,
                      format_number(p.t_bp), p.out_of_range ? "out_of_range" : p.at_base ? "at_base" : "ok"});
  write_csv(csv, t);
}

inference::SelfHeatingCurve read_self_heating_csv(const fs::path& csv) {
  const auto t = read_csv(csv);
  const auto cn = t.column("n_bar"), ct = t.column("t_eff_kelvin"), cs = t.column("t_eff_sigma"),
             cd = t.column("device_id");
  const bool has_tbp = t.has_column("t_bp_kelvin"), has_status = t.has_column("status");
  inference::SelfHeatingCurve c;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    inference::SelfHeatingPoint p;
    p.n_bar = t.number(r, cn);
    p.t_eff = t.number(r, ct);
    p.sigma_t = t.number(r, cs);
    p.device_id = t.cell(r, cd);
    if (has_tbp) p.t_bp = t.number(r, t.column("t_bp_kelvin"));
    if (has_status) {
      const auto& s = t.cell(r, t.column("status"));
      if (s != "ok" && s != "at_base" && s != "out_of_range")
        throw SchemaError("status", "unknown value '" + s + "' in " + csv.string());
      p.at_base = s == "at_base";
      p.out_of_range = s == "out_of_range";
    }
    c.points.push_back(p);
  }
  return c;
}

// ---- spectra ----------------------------------------------------------------------

ftir::IrSpectrum read_spectrum(const fs::path& csv) {
  const auto t = read_csv(csv);
  const auto cw = t.column("wavenumber_cm1"), ca = t.column("absorbance");
  ftir::IrSpectrum s;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    s.wavenumber.push_back(t.number(r, cw));
    s.absorbance.push_back(t.number(r, ca));
  }
  const auto side_path = sidecar_path(csv);
  if (!fs::exists(side_path)) throw SchemaError("sidecar", "missing " + side_path.string());
  const auto side = read_json(side_path);
  s.thickness_cm = json_number_at(side, "thickness_cm");
  s.label = side.contains("label") ? json_string_at(side, "label") : "other";
  s.validate();
  return s;
}

void write_spectrum(const fs::path& csv, const ftir::IrSpectrum& s) {
  s.validate();
  auto t = table({"wavenumber_cm1", "absorbance"});
  for (std::size_t i = 0; i < s.size(); ++i)
    t.rows.push_back({format_number(s.wavenumber[i]), format_number(s.absorbance[i])});
  write_csv(csv, t);
  write_json(sidecar_path(csv), json{{"thickness_cm", s.thickness_cm}, {"label", s.label}});
}

json peak_to_json(const ftir::PeakModel& p) {
  return json{{"name", p.name},
              {"center_cm1", p.center},
              {"sigma_cm1", p.sigma},
              {"amplitude", p.amplitude},
              {"area_cm1", p.area},
              {"sigmas",
               {{"center_cm1", number_json(p.sigmas.center)},
                {"sigma_cm1", number_json(p.sigmas.sigma)},
                {"amplitude", number_json(p.sigmas.amplitude)},
                {"area_cm1", number_json(p.sigmas.area)}}},
              {"local_noise", p.local_noise},
              {"upper_limit", p.upper_limit},
              {"area_bound_cm1", p.upper_limit ? number_json(p.area_bound) : json(nullptr)},
              {"converged", p.converged},
              {"message", p.message}};
}

json hydrogen_to_json(const ftir::HydrogenResult& h) {
  return json{{"n_sih_per_cm3", h.n_sih},
              {"n_nh_per_cm3", h.n_nh},
              {"atomic_h_percent", h.atomic_h_percent},
              {"sigmas",
               {{"n_sih_per_cm3", number_json(h.sigma_n_sih)},
                {"n_nh_per_cm3", number_json(h.sigma_n_nh)},
                {"atomic_h_percent", number_json(h.sigma_percent)}}},
              {"upper_limit", h.upper_limit}};
}

// ---- film parameters ----------------------------------------------------------------

json terms_to_json(const tlsmodel::ModelTerms& t) {
  return json{{"background", t.background},
              {"resonant", t.resonant},
              {"relaxation", t.relaxation},
              {"quasiparticle", t.quasiparticle},
              {"self_heating", t.self_heating}};
}

tlsmodel::ModelTerms terms_from_json(const json& j, tlsmodel::ModelTerms t) {
  if (!j.is_object()) throw SchemaError("terms", "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_boolean()) throw SchemaError("terms." + k, "expected true or false");
    const bool b = v.get<bool>();
    if (k == "background") t.background = b;
    else if (k == "resonant") t.resonant = b;
    else if (k == "relaxation") t.relaxation = b;
    else if (k == "quasiparticle") t.quasiparticle = b;
    else if (k == "self_heating") t.self_heating = b;
    else throw SchemaError("terms." + k, "unknown model term");
  }
  return t;
}

json film_to_json(const tlsmodel::FilmParams& f) {
  json j{{"tan_res", f.tan_res},
         {"n_c", f.n_c},
         {"tan_rel", f.tan_rel},
         {"t0_kelvin", f.t0},
         {"q_bg_inv", f.q_bg_inv},
         {"d", f.kernel.d},
         {"kernel", {{"gamma_bar_joule", f.kernel.gamma_bar}, {"v_bar_m_per_s", f.kernel.v_bar}, {"rho_d", f.kernel.rho_d}}},
         {"quasiparticle", {{"tc_kelvin", f.qp.tc}, {"alpha_kin", f.qp.alpha_kin}}},
         {"terms", terms_to_json(f.terms)}};
  if (f.heat)
    j["self_heating"] = {{"a_kelvin", f.heat->a_coeff}, {"beta", f.heat->beta}, {"t_bp_kelvin", f.heat->t_bp}};
  else
    j["self_heating"] = nullptr;
  return j;
}

tlsmodel::FilmParams film_from_json(const json& j) {
  tlsmodel::FilmParams f;
  f.tan_res = json_number_at(j, "tan_res");
  f.n_c = json_number_at(j, "n_c");
  f.tan_rel = json_number_at(j, "tan_rel");
  f.t0 = json_number_at(j, "t0_kelvin");
  f.q_bg_inv = json_number_at(j, "q_bg_inv");
  const int d = j.contains("d") ? j.at("d").get<int>() : 2;
  f.kernel = tlsmodel::RelaxKernelParams::defaults(d);
  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    if (k.contains("gamma_bar_joule")) f.kernel.gamma_bar = json_number_at(k, "gamma_bar_joule");
    if (k.contains("v_bar_m_per_s")) f.kernel.v_bar = json_number_at(k, "v_bar_m_per_s");
    if (k.contains("rho_d")) f.kernel.rho_d = json_number_at(k, "rho_d");
  }
  f.kernel.validate();
  if (j.contains("quasiparticle")) {
    const auto& q = j.at("quasiparticle");
    if (q.contains("tc_kelvin")) f.qp.tc = json_number_at(q, "tc_kelvin");
    if (q.contains("alpha_kin")) f.qp.alpha_kin = json_number_at(q, "alpha_kin");
  }
  if (j.contains("self_heating") && !j.at("self_heating").is_null()) {
    const auto& h = j.at("self_heating");
    tlsmodel::SelfHeatingLaw law;
    law.a_coeff = json_number_at(h, "a_kelvin");
    law.beta = json_number_at(h, "beta");
    if (h.contains("t_bp_kelvin")) law.t_bp = json_number_at(h, "t_bp_kelvin");
    law.validate();
    f.heat = law;
  }
  if (j.contains("terms")) f.terms = terms_from_json(j.at("terms"));
  if (!(f.n_c > 0.0)) throw SchemaError("n_c", "must be > 0");
  if (!(f.t0 > 0.0)) throw SchemaError("t0_kelvin", "must be > 0");
  return f;
}

json model_card(const tlsmodel::FilmParams& f, const std::map<std::string, std::string>& provenance) {
  auto prov = [&](const std::string& key) {
    auto it = provenance.find(key);
    return it == provenance.end() ? std::string("user supplied") : it->second;
  };
  json rows = json::array();
  auto add = [&](const std::string& name, double value, const std::string& unit, const std::string& key) {
    rows.push_back({{"parameter", name}, {"value", number_json(value)}, {"unit", unit}, {"provenance", prov(key)}});
  };
  add("tan_res", f.tan_res, "1", "tan_res");
  add("n_c", f.n_c, "photons", "n_c");
  add("tan_rel", f.tan_rel, "1", "tan_rel");
  add("t0", f.t0, "K", "t0");
  add("q_bg_inv", f.q_bg_inv, "1", "q_bg_inv");
  add("d", f.kernel.d, "1", "d");
  add("gamma_bar", f.kernel.gamma_bar, "J", "kernel");
  add("v_bar", f.kernel.v_bar, "m/s", "kernel");
  add("rho_d", f.kernel.rho_d, f.kernel.d == 3 ? "kg/m^3" : f.kernel.d == 2 ? "kg/m^2" : "kg/m", "kernel");
  add("tc", f.qp.tc, "K", "tc");
  add("alpha_kin", f.qp.alpha_kin, "1", "alpha_kin");
  if (f.heat) {
    add("heat_a", f.heat->a_coeff, "K", "heat");
    add("heat_beta", f.heat->beta, "1", "heat");
  }
  return json{{"parameters", rows}, {"terms", terms_to_json(f.terms)}};
}

}  // namespace tlsloss::io
