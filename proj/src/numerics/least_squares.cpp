#include "tlsloss/numerics/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tlsloss::numerics {
namespace {

constexpr double kSqrtEps = 1.4901161193847656e-08;

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

Eigen::VectorXd FitResult::sigmas() const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(params.size());
  for (std::size_t k = 0; k < free_index.size(); ++k) {
    const double var = covariance(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    s[free_index[k]] = std::isfinite(var) ? std::sqrt(std::max(var, 0.0)) : var;
  }
  return s;
}

Eigen::MatrixXd forward_jacobian(const ResidualFn& f, const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& f0) {
  Eigen::MatrixXd jac(f0.size(), p.size());
  Eigen::VectorXd trial = p;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double h = kSqrtEps * std::max(std::abs(p[j]), 1.0);
    trial[j] = p[j] + h;
    jac.col(j) = (f(trial) - f0) / h;
    trial[j] = p[j];
  }
  return jac;
}

FitResult nlls_fit(const FitProblem& problem) {
  const Eigen::Index n = problem.initial.size();
  if (!problem.residuals) throw std::invalid_argument("nlls_fit: no residual function");
  if (!problem.frozen.empty() && static_cast<Eigen::Index>(problem.frozen.size()) != n)
    throw std::invalid_argument("nlls_fit: frozen mask length mismatch");
  if (problem.lower.size() != 0 && problem.lower.size() != n)
    throw std::invalid_argument("nlls_fit: lower bound length mismatch");
  if (problem.upper.size() != 0 && problem.upper.size() != n)
    throw std::invalid_argument("nlls_fit: upper bound length mismatch");

  const Eigen::VectorXd lower = problem.lower.size() ? problem.lower
      : Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  const Eigen::VectorXd upper = problem.upper.size() ? problem.upper
      : Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (problem.initial[i] < lower[i] || problem.initial[i] > upper[i])
      throw std::invalid_argument("nlls_fit: initial parameter outside bounds");
  }

  std::vector<int> free;
  for (Eigen::Index i = 0; i < n; ++i)
    if (problem.frozen.empty() || !problem.frozen[static_cast<std::size_t>(i)])
      free.push_back(static_cast<int>(i));
  const auto k = static_cast<Eigen::Index>(free.size());

  const auto& w = problem.weights;
  if (w.size() != 0 && (w.array() <= 0.0).any())
    throw std::invalid_argument("nlls_fit: weights must be strictly positive");

  auto residuals = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    Eigen::VectorXd r = problem.residuals(p);
    if (w.size() != 0) {
      if (w.size() != r.size())
        throw std::invalid_argument("nlls_fit: weight vector length differs from residuals");
      r.array() *= w.array();
    }
    return r;
  };

  auto jacobian = [&](const Eigen::VectorXd& p, const Eigen::VectorXd& r) -> Eigen::MatrixXd {
    Eigen::MatrixXd jac(r.size(), k);
    if (problem.jacobian) {
      Eigen::MatrixXd full = problem.jacobian(p);
      if (w.size() != 0) full = w.asDiagonal() * full;
      for (Eigen::Index c = 0; c < k; ++c) jac.col(c) = full.col(free[c]);
      return jac;
    }
    Eigen::VectorXd trial = p;
    for (Eigen::Index c = 0; c < k; ++c) {
      const int j = free[c];
      double h = kSqrtEps * std::max(std::abs(p[j]), 1.0);
      if (p[j] + h > upper[j]) h = -h;
      trial[j] = p[j] + h;
      jac.col(c) = (residuals(trial) - r) / h;
      trial[j] = p[j];
    }
    return jac;
  };

  FitResult result;
  result.free_index = free;
  Eigen::VectorXd p = problem.initial;
  Eigen::VectorXd r = residuals(p);
  if (!all_finite(r)) throw std::invalid_argument("nlls_fit: residuals not finite at initial point");
  double cost = r.squaredNorm();
  double lambda = problem.options.initial_damping;

  int iter = 0;
  for (; iter < problem.options.max_iterations && k > 0; ++iter) {
    if (cost == 0.0) {
      result.converged = true;
      result.message = "zero residual";
      break;
    }
    const Eigen::MatrixXd jac = jacobian(p, r);
    const Eigen::MatrixXd gram = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    Eigen::VectorXd scale = gram.diagonal();
    const double max_diag = scale.size() ? scale.maxCoeff() : 0.0;
    for (Eigen::Index c = 0; c < k; ++c)
      if (!(scale[c] > 1e-30 * max_diag)) scale[c] = max_diag > 0.0 ? 1e-30 * max_diag : 1.0;

    bool accepted = false;
    Eigen::VectorXd step;
    Eigen::VectorXd r_trial;
    double cost_trial = cost;
    while (lambda < 1e25) {
      Eigen::MatrixXd damped = gram;
      damped.diagonal() += lambda * scale;
      const Eigen::VectorXd delta = damped.ldlt().solve(-grad);
      if (!delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      Eigen::VectorXd trial = p;
      for (Eigen::Index c = 0; c < k; ++c) {
        const int j = free[c];
        trial[j] = std::clamp(p[j] + delta[c], lower[j], upper[j]);
      }
      step = trial - p;
      if (step.squaredNorm() == 0.0) break;
      r_trial = residuals(trial);
      cost_trial = all_finite(r_trial) ? r_trial.squaredNorm()
                                       : std::numeric_limits<double>::infinity();
      if (cost_trial < cost) {
        accepted = true;
        lambda = std::max(lambda / 10.0, 1e-20);
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      result.converged = true;
      result.message = "no further decrease of the residual norm";
      break;
    }

    double p_norm = 0.0;
    for (int j : free) p_norm += p[j] * p[j];
    const double rel_step = step.norm() / (std::sqrt(p_norm) + problem.options.x_tol);
    const double norm_old = std::sqrt(cost);
    const double norm_new = std::sqrt(cost_trial);
    const double rel_change = (norm_old - norm_new) / norm_old;
    p += step;
    r = r_trial;
    cost = cost_trial;
    if (rel_step < problem.options.x_tol && rel_change < problem.options.f_tol) {
      result.converged = true;
      result.message = "relative step and residual change below tolerance";
      ++iter;
      break;
    }
  }
  if (k == 0) {
    result.converged = true;
    result.message = "no free parameters";
  }
  if (!result.converged) result.message = "iteration cap reached";

  result.params = p;
  result.residuals = r;
  result.residual_norm = std::sqrt(cost);
  result.chi2 = cost;
  result.iterations = iter;
  result.dof = static_cast<int>(r.size()) - static_cast<int>(k);

  result.covariance = Eigen::MatrixXd::Zero(k, k);
  if (k > 0) {
    const Eigen::MatrixXd jac = jacobian(p, r);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = sv.size() ? 1e-12 * sv[0] : 0.0;
    Eigen::VectorXd inv_sq = Eigen::VectorXd::Zero(sv.size());
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv[i] > cutoff && sv[i] > 0.0) {
        inv_sq[i] = 1.0 / (sv[i] * sv[i]);
        ++rank;
      }
    }
    result.degenerate = rank < k;
    const Eigen::MatrixXd& v = svd.matrixV();
    result.covariance = v * inv_sq.asDiagonal() * v.transpose();
    if (problem.options.scale_covariance && result.dof > 0)
      result.covariance *= cost / result.dof;
    if (result.degenerate) {
      for (Eigen::Index i = rank; i < sv.size(); ++i) {
        for (Eigen::Index c = 0; c < k; ++c) {
          if (std::abs(v(c, i)) > 1e-8)
            result.covariance(c, c) = std::numeric_limits<double>::infinity();
        }
      }
      result.message += "; normal equations singular (degenerate fit)";
    }
  }
  return result;
}

}  // namespace tlsloss::numerics
