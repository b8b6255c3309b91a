#include "ace/nuisance.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "ace/common.hpp"

namespace ace::nuisance {

namespace {

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

void check_inputs(const Eigen::Ref<const Eigen::MatrixXd>& X,
                  const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (X.rows() < 2 || X.cols() < 1) throw std::invalid_argument("lasso: need n >= 2 and p >= 1");
  if (X.rows() != y.size()) throw std::invalid_argument("lasso: X and y row counts differ");
  if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("lasso: non-finite data");
}

}  // namespace

LassoResult lasso_fit(const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& y, const LassoConfig& config) {
  check_inputs(X, y);
  if (config.lambda < 0.0) throw std::invalid_argument("lasso: lambda must be >= 0");
  if (config.max_iters < 1 || config.tol <= 0.0) {
    throw std::invalid_argument("lasso: max_iters >= 1 and tol > 0 required");
  }

  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const double dn = static_cast<double>(n);

  // Center columns and response; optionally scale to unit (population) SD.
  const Eigen::RowVectorXd col_mean = X.colwise().mean();
  const double y_mean = y.mean();
  Eigen::MatrixXd Z = X.rowwise() - col_mean;
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(p);
  Eigen::VectorXd col_norm2(p);  // <z_j, z_j>/n after scaling
  for (Eigen::Index j = 0; j < p; ++j) {
    const double var = Z.col(j).squaredNorm() / dn;
    if (config.standardize) {
      const double sd = std::sqrt(var);
      if (sd > 0.0) {
        scale[j] = sd;
        Z.col(j) /= sd;
        col_norm2[j] = 1.0;
      } else {
        col_norm2[j] = 0.0;  // constant column, coefficient stays 0
      }
    } else {
      col_norm2[j] = var;
    }
  }
  Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual = yc;

  LassoResult result;
  for (int sweep = 1; sweep <= config.max_iters; ++sweep) {
    double max_update = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_norm2[j] == 0.0) continue;
      const double old = beta[j];
      const double rho = Z.col(j).dot(residual) / dn + col_norm2[j] * old;
      const double updated = soft_threshold(rho, config.lambda) / col_norm2[j];
      if (updated != old) {
        residual.noalias() -= Z.col(j) * (updated - old);
        beta[j] = updated;
        max_update = std::max(max_update, std::abs(updated - old));
      }
    }
    result.sweeps = sweep;
#ifndef NDEBUG
    {
      const double obj =
          residual.squaredNorm() / (2.0 * dn) + config.lambda * beta.template lpNorm<1>();
      if (!result.objective_path.empty()) {
        assert(obj <= result.objective_path.back() + 1e-12 * (1.0 + std::abs(obj)));
      }
      result.objective_path.push_back(obj);
    }
#endif
    if (max_update < config.tol) {
      result.converged = true;
      break;
    }
  }

  // Back to the original scale.
  Eigen::VectorXd coef = beta.array() / scale.array();
  result.predictor.coef = coef;
  result.predictor.intercept = y_mean - col_mean * coef;
  return result;
}

double lasso_objective(const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXd>& y, const LinearPredictor& fit,
                       double lambda) {
  const Eigen::VectorXd r = y - fit.predict_all(X);
  return r.squaredNorm() / (2.0 * static_cast<double>(X.rows())) +
         lambda * fit.coef.template lpNorm<1>();
}

double lambda_default(const Eigen::Ref<const Eigen::MatrixXd>& X,
                      const Eigen::Ref<const Eigen::VectorXd>& y, double c) {
  check_inputs(X, y);
  const double n = static_cast<double>(X.rows());
  const double p = static_cast<double>(X.cols());
  const double rate = std::sqrt(2.0 * std::log(p) / n);

  const double sd0 = std::sqrt((y.array() - y.mean()).square().sum() / n);
  if (sd0 == 0.0) return 0.0;

  LassoConfig cfg;
  cfg.lambda = c * sd0 * rate;
  const LassoResult pilot = lasso_fit(X, y, cfg);
  const Eigen::VectorXd r = y - pilot.predictor.predict_all(X);
  const double sigma_hat = std::sqrt(r.squaredNorm() / n);
  return c * sigma_hat * rate;
}

double lasso_cv_lambda(const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXd>& y, const LassoConfig& config,
                       int folds, int grid_size) {
  check_inputs(X, y);
  if (folds < 2 || grid_size < 2) throw std::invalid_argument("lasso_cv: folds/grid too small");
  const Eigen::Index n = X.rows();
  if (n < folds) throw std::invalid_argument("lasso_cv: fewer rows than folds");

  // Null-model threshold on the standardized problem, then a log-spaced grid.
  const Eigen::RowVectorXd col_mean = X.colwise().mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Eigen::VectorXd zj = X.col(j).array() - col_mean[j];
    const double sd = std::sqrt(zj.squaredNorm() / static_cast<double>(n));
    if (sd == 0.0) continue;
    if (config.standardize) zj /= sd;
    lambda_max = std::max(lambda_max, std::abs(zj.dot(yc)) / static_cast<double>(n));
  }
  if (lambda_max == 0.0) return 0.0;

  const double lambda_min = lambda_max * 1e-3;
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  for (int g = 0; g < grid_size; ++g) {
    const double frac = static_cast<double>(g) / (grid_size - 1);
    grid[g] = lambda_max * std::pow(lambda_min / lambda_max, frac);
  }

  // Round-robin folds keep the assignment deterministic.
  double best_lambda = grid.front();
  double best_mse = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    KahanSum sq_err;
    for (int f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> train_rows;
      std::vector<Eigen::Index> test_rows;
      for (Eigen::Index i = 0; i < n; ++i) {
        (i % folds == f ? test_rows : train_rows).push_back(i);
      }
      Eigen::MatrixXd Xtr(train_rows.size(), X.cols());
      Eigen::VectorXd ytr(train_rows.size());
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        Xtr.row(i) = X.row(train_rows[i]);
        ytr[i] = y[train_rows[i]];
      }
      LassoConfig cfg = config;
      cfg.lambda = lambda;
      const LassoResult fit = lasso_fit(Xtr, ytr, cfg);
      for (Eigen::Index i : test_rows) {
        const double e = y[i] - fit.predictor.predict(X.row(i));
        sq_err.add(e * e);
      }
    }
    const double mse = sq_err.value() / static_cast<double>(n);
    if (mse < best_mse) {
      best_mse = mse;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

LinearPredictor oracle_nuisance(const LinearPredictor& truth, double epsilon, PerturbMode mode,
                                std::uint64_t seed) {
  if (epsilon < 0.0) throw std::invalid_argument("oracle_nuisance: epsilon must be >= 0");
  LinearPredictor out = truth;
  if (epsilon == 0.0) return out;
  switch (mode) {
    case PerturbMode::AdditiveFunction:
      out.intercept += epsilon;
      break;
    case PerturbMode::CoefficientInflation: {
      if (truth.dim() == 0) throw std::invalid_argument("oracle_nuisance: empty coefficient vector");
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      Eigen::VectorXd dir(truth.dim());
      do {
        for (Eigen::Index j = 0; j < dir.size(); ++j) dir[j] = gauss(rng);
      } while (dir.norm() == 0.0);
      out.coef += dir * (epsilon / dir.norm());
      break;
    }
  }
  return out;
}

}  // namespace ace::nuisance
