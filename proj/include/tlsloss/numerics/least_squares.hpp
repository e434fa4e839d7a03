#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tlsloss::numerics {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct FitOptions {
  int max_iterations = 200;
  double x_tol = 1e-10;       // relative step size
  double f_tol = 1e-10;       // relative change of the residual norm
  double initial_damping = 1e-3;
  // Multiply the Gram-matrix inverse by chi^2 / dof. Turn off when the
  // weights are exact inverse standard deviations and you want them trusted.
  bool scale_covariance = true;
};

struct FitProblem {
  ResidualFn residuals;
  JacobianFn jacobian;  // optional; forward differences when empty
  Eigen::VectorXd initial;
  Eigen::VectorXd lower;    // empty => unbounded
  Eigen::VectorXd upper;    // empty => unbounded
  Eigen::VectorXd weights;  // empty => unit weights; else one positive entry per residual
  std::vector<bool> frozen; // empty => all free
  FitOptions options;
};

struct FitResult {
  Eigen::VectorXd params;      // full vector, frozen entries untouched
  Eigen::MatrixXd covariance;  // free parameters only, in free-index order
  std::vector<int> free_index; // maps covariance rows to params entries
  Eigen::VectorXd residuals;   // weighted, at the solution
  double residual_norm = 0.0;  // ||W r||
  double chi2 = 0.0;           // residual_norm^2
  int dof = 0;
  bool converged = false;
  bool degenerate = false;     // rank-deficient Gram matrix at the solution
  int iterations = 0;
  std::string message;

  // 1-sigma for every parameter; frozen ones get 0.
  Eigen::VectorXd sigmas() const;
};

// Levenberg-Marquardt with multiplicative damping (x10 on reject, /10 on
// accept) and Marquardt diagonal scaling. A trial step is accepted only when
// it strictly lowers the weighted residual norm, so the first parameter set
// reaching a given norm is the one kept. Steps are projected onto the bounds.
// Non-finite trial residuals count as rejections.
FitResult nlls_fit(const FitProblem& problem);

// Forward-difference Jacobian with step sqrt(eps) * max(|p|, 1).
Eigen::MatrixXd forward_jacobian(const ResidualFn& f, const Eigen::VectorXd& p,
                                 const Eigen::VectorXd& f0);

}  // namespace tlsloss::numerics
