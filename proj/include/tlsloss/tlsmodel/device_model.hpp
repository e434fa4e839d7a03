#pragma once

#include <optional>
#include <string>

#include "tlsloss/tlsmodel/params.hpp"
#include "tlsloss/tlsmodel/relaxation.hpp"

namespace tlsloss::tlsmodel {

// The four loss contributions and their sum, evaluated at t_eff.
struct LossBreakdown {
  double background = 0.0;
  double resonant = 0.0;
  double relaxation = 0.0;
  double quasiparticle = 0.0;
  double total = 0.0;  // background + resonant + relaxation + quasiparticle, in that order
  double t_eff = 0.0;  // K
};

// Total internal loss at photon number n and base-plate temperature t_bp.
// When `heat` is given, every term is evaluated at t_bp + heat->heating(n).
// The relaxation term is the full double integral calibrated to p.f_tan_rel
// at p.t0; the quasiparticle term is evaluated at f0 (qp.f0 is ignored).
// `table`, when given, must be built for (f0, k) and replaces the direct integral.
LossBreakdown loss_breakdown(double n, double t_bp, double f0, const TlsParams& p,
                             const RelaxKernelParams& k, const QpParams& qp,
                             const std::optional<SelfHeatingLaw>& heat = std::nullopt,
                             const ModelTerms& terms = {}, const RelaxationTable* table = nullptr);

double q_total_inv(double n, double t_bp, double f0, const TlsParams& p, const RelaxKernelParams& k,
                   const QpParams& qp, const std::optional<SelfHeatingLaw>& heat = std::nullopt);

// A resonator of a multi-device chip sharing one dielectric film.
struct Device {
  std::string id;
  double f0 = 6e9;         // Hz, at base temperature and low power
  double f_sin = 0.1;      // electric-field participation of the film
  double q_ext_inv = 1e-4; // |Qe^-1|
  double phi = 0.0;        // rad
};

// Film-level loss tangents shared by all devices; per-device TLS prefactors
// are f_sin times these (the background loss is not scaled).
struct FilmParams {
  double tan_res = 0.0;
  double n_c = 20.0;
  double tan_rel = 0.0;
  double t0 = 0.5;
  double q_bg_inv = 0.0;
  RelaxKernelParams kernel = RelaxKernelParams::defaults(2);
  QpParams qp{};
  std::optional<SelfHeatingLaw> heat;
  ModelTerms terms{};

  TlsParams for_device(const Device& dev) const;
  LossBreakdown loss(const Device& dev, double n, double t_bp,
                     const RelaxationTable* table = nullptr) const;
  // Internal loss without self-heating (the "TLS-only" curve).
  LossBreakdown loss_no_heat(const Device& dev, double n, double t,
                             const RelaxationTable* table = nullptr) const;
  // TLS fractional frequency shift at temperature t.
  double shift(const Device& dev, double t) const;
};

}  // namespace tlsloss::tlsmodel
