#pragma once

#include <array>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tlsloss/numerics/least_squares.hpp"
#include "tlsloss/tlsmodel/device_model.hpp"

namespace tlsloss::inference {

enum class SweepKind { power, temperature };

struct LossPoint {
  double n_bar = 0.0;
  double t_bp = 0.01;       // K
  double q_int_inv = 0.0;
  double sigma = 0.0;       // 1-sigma of q_int_inv, > 0
  std::string device_id;
  double f_sin = 0.0;       // participation of the film
  double f0 = 0.0;          // Hz
};

struct LossDataset {
  std::vector<LossPoint> points;
  SweepKind kind = SweepKind::power;

  // Per-point field checks; throws SchemaError naming the field.
  void validate() const;
  bool empty() const { return points.empty(); }
};

// Relaxation tables are expensive to build; share one per resonance frequency.
class RelaxationCache {
public:
  explicit RelaxationCache(const tlsmodel::RelaxKernelParams& kernel) : kernel_(kernel) {}
  const tlsmodel::RelaxationTable& get(double f0);
  // Build every missing table for the given frequencies, in parallel.
  void prefetch(const std::vector<double>& f0s, int jobs = 0);
  const tlsmodel::RelaxKernelParams& kernel() const { return kernel_; }

private:
  tlsmodel::RelaxKernelParams kernel_;
  std::map<double, std::shared_ptr<const tlsmodel::RelaxationTable>> tables_;
};

// Index of the fit parameters, in the order of LossFitResult::sigmas.
enum LossParam { kTanRes = 0, kNc, kTanRel, kQbg, kHeatA, kHeatBeta, kLossParamCount };
const char* loss_param_name(int i);

struct LossFitConfig {
  tlsmodel::ModelTerms terms{};                 // self_heating: fit T_eff = T_bp + A n^beta
  int d = 2;                                    // bath dimensionality of the relaxation term
  double t0 = 0.5;                              // K
  std::optional<tlsmodel::RelaxKernelParams> kernel;  // default: RelaxKernelParams::defaults(d)
  tlsmodel::QpParams qp{};
  // Parameters held fixed at the given value, by name: tan_res, n_c, tan_rel,
  // q_bg_inv, heat_a, heat_beta. heat_beta is frozen at 0.5 unless listed in
  // `free_beta`.
  std::map<std::string, double> frozen;
  bool free_beta = false;
  // Starting point; heuristic from the data when absent.
  std::optional<tlsmodel::FilmParams> initial;
  // Weight of the ridge pulling tan_rel (in units of 1e-3) toward zero.
  double relaxation_ridge = 1e-12;
  // Gate, in Gaussian sigmas, for keeping a fitted self-heating amplitude over
  // the nested fit with the amplitude at zero; 0 keeps the heated fit always.
  double heat_gate_sigmas = 3.0;
  int jobs = 0;  // threads for building relaxation tables, 0 = hardware
};

struct LossFitResult {
  tlsmodel::FilmParams film;                     // fitted values (heat set when fitted)
  std::array<double, kLossParamCount> sigmas{};  // 1-sigma, 0 for frozen or disabled
  std::array<bool, kLossParamCount> fitted{};    // parameter was free
  numerics::FitResult fit;
  double chi2_dof = 0.0;
  bool degenerate = false;  // covariance unreliable
  bool heat_significant = true;  // false: the amplitude failed the gate and was set to zero
  double heat_delta_chi2 = std::numeric_limits<double>::quiet_NaN();  // nested minus full chi^2
  std::vector<std::string> warnings;
  // Normalized residuals (data - model) / sigma, power points first.
  std::vector<double> residuals;
};

// Model Qi^-1 of one data point for the given film parameters.
double model_point(const LossPoint& pt, const tlsmodel::FilmParams& film,
                   RelaxationCache& cache, bool with_heat = true);

// Joint weighted least squares over both sweeps. Per-point f_sin multiplies the
// shared loss tangents; the background loss is shared unscaled. An empty
// temperature dataset is accepted but, with relaxation enabled, is reported
// as unidentifiable.
LossFitResult fit_loss_model(const LossDataset& power, const LossDataset& temp,
                             const LossFitConfig& config = {},
                             RelaxationCache* cache = nullptr);

}  // namespace tlsloss::inference
