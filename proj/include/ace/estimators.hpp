#pragma once

#include <cstdint>

#include "ace/cumulants.hpp"
#include "ace/dataset.hpp"
#include "ace/nuisance.hpp"

namespace ace::estimators {

struct AceConfig {
  enum class Split { Shuffled, Sequential };

  int order = 1;                  // r, in [1, 8]
  double split_fraction = 0.5;    // share of rows going to the cumulant fold
  bool swap_and_average = false;  // also run with the folds exchanged and average
  std::uint64_t seed = 0;         // drives the split permutation
  Split split = Split::Shuffled;
};

struct AceEstimate {
  double theta_hat = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double level = 0.95;
  double denominator = 0.0;  // per-sample mean of (T - ghat) J_r(T - ghat) on the moment fold
  double numerator = 0.0;    // per-sample mean of (Y - qhat) J_r(T - ghat) on the moment fold
  double v_m_hat = 0.0;      // plug-in moment-function variance
  cumulants::CumulantSet cumulants;  // residual cumulants from the first fold (orders 1..r+1)
  Eigen::Index n_estimation = 0;     // rows in the moment fold
};

/// The first-order debiased ratio estimate
///   [ (1/n) sum (T_i - ghat)^2 ]^{-1} [ (1/n) sum (Y_i - qhat)(T_i - ghat) ].
double dml_estimate(const Dataset& data, const nuisance::LinearPredictor& g_hat,
                    const nuisance::LinearPredictor& q_hat);

/// dml_estimate plus the same plug-in standard error / CI machinery the
/// higher-order estimator uses, computed on the full sample without splitting.
AceEstimate dml_inference(const Dataset& data, const nuisance::LinearPredictor& g_hat,
                          const nuisance::LinearPredictor& q_hat, double level = 0.95);

/// The order-r cumulant-based estimator: split the sample, estimate residual
/// cumulants on the first fold, build J_r, and solve the (affine in theta)
/// moment equation
///   sum [Y - qhat - theta (T - ghat)] J_r(T - ghat) = 0
/// on the second fold, with plug-in inference. The nuisances must have been
/// fitted on data disjoint from `data`; that is the caller's contract.
AceEstimate ace_estimate(const Dataset& data, const nuisance::LinearPredictor& g_hat,
                         const nuisance::LinearPredictor& q_hat, const AceConfig& config,
                         double level = 0.95);

/// theta_hat +/- z * std_error at the given two-sided level.
std::pair<double, double> confidence_interval(const AceEstimate& est, double level);

/// Standard normal quantile.
double normal_quantile(double p);

}  // namespace ace::estimators
