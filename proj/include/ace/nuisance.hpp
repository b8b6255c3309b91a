#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace ace::nuisance {

/// Affine prediction rule: intercept + <coef, x>.
struct LinearPredictor {
  double intercept = 0.0;
  Eigen::VectorXd coef;

  double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return intercept + coef.dot(x);
  }
  Eigen::VectorXd predict_all(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    return (X * coef).array() + intercept;
  }
  Eigen::Index dim() const { return coef.size(); }
};

struct LassoConfig {
  double lambda = 0.0;      // l1 penalty on the (standardized) coefficients
  int max_iters = 10000;    // coordinate-descent sweeps
  double tol = 1e-7;        // max absolute coefficient update per sweep
  bool standardize = true;  // scale columns to unit variance before fitting
};

struct LassoResult {
  LinearPredictor predictor;
  bool converged = false;
  int sweeps = 0;
  // Objective value after each sweep; only recorded in debug builds, where a
  // non-increase is also asserted.
  std::vector<double> objective_path;
};

/// Cyclic coordinate descent with soft thresholding. The intercept is never
/// penalized; columns are centered (and optionally scaled) internally and the
/// coefficients are returned in the original scale. Deterministic.
LassoResult lasso_fit(const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& y, const LassoConfig& config);

/// (1/2n)||y - intercept - X b||^2 + lambda ||b||_1, the objective lasso_fit minimizes.
double lasso_objective(const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXd>& y, const LinearPredictor& fit,
                       double lambda);

/// Theoretically motivated penalty c * sigma_hat * sqrt(2 log p / n), with
/// sigma_hat from one refit pass started at the centered-y standard deviation.
double lambda_default(const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& y, double c = 1.0);

/// K-fold cross-validated penalty over a log-spaced grid below the null-model
/// threshold. Folds are assigned round-robin; deterministic.
double lasso_cv_lambda(const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXd>& y, const LassoConfig& config,
                       int folds = 5, int grid_size = 30);

enum class PerturbMode {
  CoefficientInflation,  // coef += epsilon * (seeded uniform unit direction)
  AdditiveFunction,      // intercept += epsilon
};

/// A predictor at population L2(P_X) distance exactly epsilon from `truth`
/// when X ~ N(0, I); the handle for controlled nuisance-error experiments.
LinearPredictor oracle_nuisance(const LinearPredictor& truth, double epsilon, PerturbMode mode,
                                std::uint64_t seed);

}  // namespace ace::nuisance
