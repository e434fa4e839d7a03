#include "tlsloss/tlsmodel/device_model.hpp"

#include "tlsloss/error.hpp"
#include "tlsloss/tlsmodel/loss.hpp"
#include "tlsloss/tlsmodel/shift.hpp"

namespace tlsloss::tlsmodel {

LossBreakdown loss_breakdown(double n, double t_bp, double f0, const TlsParams& p,
                             const RelaxKernelParams& k, const QpParams& qp,
                             const std::optional<SelfHeatingLaw>& heat, const ModelTerms& terms,
                             const RelaxationTable* table) {
  p.validate();
  if (terms.relaxation && p.d != k.d)
    throw DomainError("loss_breakdown: TlsParams.d and RelaxKernelParams.d differ");
  if (!(t_bp > 0.0)) throw DomainError("loss_breakdown: base temperature must be > 0");
  if (n < 0.0) throw DomainError("loss_breakdown: photon number must be >= 0");

  LossBreakdown out;
  out.t_eff = t_bp;
  if (heat && terms.self_heating) out.t_eff = t_bp + heat->heating(n);
  const double t = out.t_eff;

  if (terms.background) out.background = p.q_bg_inv;
  if (terms.resonant) out.resonant = q_res_inv(n, t, f0, p);
  if (terms.relaxation && p.f_tan_rel > 0.0) {
    if (table) out.relaxation = p.f_tan_rel * table->normalized(t, p.t0);
    else out.relaxation = q_rel_inv_full(t, f0, relaxation_scale(p, f0, k), k);
  }
  if (terms.quasiparticle && qp.alpha_kin > 0.0) {
    QpParams at_f0 = qp;
    at_f0.f0 = f0;
    out.quasiparticle = q_qp_inv(t, at_f0);
  }
  out.total = out.background + out.resonant + out.relaxation + out.quasiparticle;
  return out;
}

double q_total_inv(double n, double t_bp, double f0, const TlsParams& p, const RelaxKernelParams& k,
                   const QpParams& qp, const std::optional<SelfHeatingLaw>& heat) {
  return loss_breakdown(n, t_bp, f0, p, k, qp, heat).total;
}

TlsParams FilmParams::for_device(const Device& dev) const {
  TlsParams p;
  p.f_tan_res = dev.f_sin * tan_res;
  p.n_c = n_c;
  p.f_tan_rel = dev.f_sin * tan_rel;
  p.t0 = t0;
  p.d = kernel.d;
  p.q_bg_inv = q_bg_inv;
  return p;
}

LossBreakdown FilmParams::loss(const Device& dev, double n, double t_bp,
                               const RelaxationTable* table) const {
  return loss_breakdown(n, t_bp, dev.f0, for_device(dev), kernel, qp, heat, terms, table);
}

LossBreakdown FilmParams::loss_no_heat(const Device& dev, double n, double t,
                                       const RelaxationTable* table) const {
  return loss_breakdown(n, t, dev.f0, for_device(dev), kernel, qp, std::nullopt, terms, table);
}

double FilmParams::shift(const Device& dev, double t) const {
  const TlsParams p = for_device(dev);
  if (!terms.relaxation || tan_rel == 0.0) return terms.resonant ? dfrac_res(t, dev.f0, p) : 0.0;
  if (!terms.resonant) return dfrac_tls(t, dev.f0, p, kernel) - dfrac_res(t, dev.f0, p);
  return dfrac_tls(t, dev.f0, p, kernel);
}

}  // namespace tlsloss::tlsmodel
