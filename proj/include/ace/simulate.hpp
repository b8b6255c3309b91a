#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ace/dataset.hpp"
#include "ace/estimators.hpp"
#include "ace/nuisance.hpp"

namespace ace::simulate {

/// Treatment-noise law for the synthetic demand-estimation benchmark family.
struct NoiseSpec {
  enum class Kind { DemandDiscrete, Gaussian, Uniform, Custom };

  Kind kind = Kind::DemandDiscrete;
  double sigma = 1.0;       // Gaussian
  double half_width = 3.0;  // Uniform on [-half_width, half_width]
  std::vector<double> points{0.5, 0.0, -1.5, -3.5};   // DemandDiscrete / Custom
  std::vector<double> probs{0.65, 0.2, 0.1, 0.05};

  /// The four-point discount law: {0.5, 0, -1.5, -3.5} with
  /// probabilities {0.65, 0.2, 0.1, 0.05}; mean 0, variance 1.
  static NoiseSpec demand_discrete();
  static NoiseSpec gaussian(double sigma);
  static NoiseSpec uniform(double half_width);
  static NoiseSpec custom(std::vector<double> points, std::vector<double> probs);

  void validate() const;
  /// Exact raw moments mu_1..mu_K of the law.
  std::vector<double> exact_moments(int max_order) const;
};

struct DgpConfig {
  Eigen::Index n = 0;
  Eigen::Index p = 100;
  Eigen::Index s = 40;          // nonzero coefficients per nuisance
  double theta0 = 1.0;
  NoiseSpec noise;              // treatment noise eta
  double xi = 0.0;              // treatment noise scales by (1 + xi * X_1)
  double coef_scale = 1.0;      // value of the nonzero nuisance coefficients
  std::uint64_t seed = 0;

  void validate() const;
};

struct DgpTruth {
  nuisance::LinearPredictor g0;  // E[T | X]
  nuisance::LinearPredictor f0;  // outcome nuisance
  nuisance::LinearPredictor q0;  // E[Y | X] = theta0 g0 + f0
  double theta0 = 0.0;
};

/// Draws a dataset from
///   T = <alpha0, X> + (1 + xi X_1) eta,   Y = theta0 T + <f0, X> + U[-3, 3],
/// with X ~ N(0, I) and seeded supports/draws. The X, eta, and outcome-noise
/// streams are derived independently of xi, so changing xi changes only T.
std::pair<Dataset, DgpTruth> gen_dataset(const DgpConfig& config);

/// Draws from the same process with the nuisance truth held fixed; used for
/// auxiliary nuisance-training samples that must share the replicate's truth.
Dataset gen_dataset(const DgpConfig& config, const DgpTruth& truth);

struct EstimatorSpec {
  enum class Kind { Dml, Ace };
  Kind kind = Kind::Ace;
  int order = 1;  // for Ace

  std::string label() const;
  static EstimatorSpec parse(const std::string& label);
};

struct NuisancePolicy {
  enum class Kind { Lasso, Oracle };
  Kind kind = Kind::Lasso;

  // Lasso: lambda < 0 means "use lambda_default(c = lambda_c)"; cv switches to
  // 5-fold cross-validation of the penalty.
  nuisance::LassoConfig lasso;
  double lambda = -1.0;
  double lambda_c = 1.0;
  bool cv = false;

  // Oracle: predictors at exact population distance from the truth.
  double epsilon1 = 0.0;
  double epsilon2 = 0.0;
  nuisance::PerturbMode mode = nuisance::PerturbMode::CoefficientInflation;
};

struct McOptions {
  int reps = 1;
  NuisancePolicy policy;
  std::uint64_t base_seed = 0;
  double level = 0.95;
  // Auxiliary protocol: nuisances come from an independent sample of the same
  // size. ThreeWaySplit instead carves the nuisance fold out of each dataset.
  enum class Protocol { AuxiliarySample, ThreeWaySplit };
  Protocol protocol = Protocol::AuxiliarySample;
  int threads = 1;  // <= 0 means hardware concurrency
};

struct McRow {
  std::string estimator;
  double rmse = 0.0;
  double bias = 0.0;
  double sd = 0.0;
  double coverage = 0.0;
  double mean_ci_width = 0.0;
  int replicates = 0;  // successful replicates aggregated
  int failures = 0;    // weak-identification / degenerate-design count
  bool high_failure_rate = false;  // failures exceed 1% of requests
};

struct McReport {
  std::vector<McRow> rows;
  double theta0 = 0.0;
  int reps_requested = 0;
};

/// One replicate-estimator record, the granularity written to estimates.csv.
struct ReplicateRow {
  int replicate = 0;
  std::string estimator;
  double theta_hat = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool covered = false;
  bool failed = false;
};

struct McResult {
  McReport report;
  std::vector<ReplicateRow> estimates;  // ordered by (replicate, estimator)
};

/// Runs `reps` independent replicates: fresh data per replicate (seed derived
/// from base_seed and the replicate index), nuisances per the policy, every
/// estimator evaluated on the same dataset and nuisances. Replicates may run
/// on several threads; aggregation order is fixed, so results are identical to
/// a single-threaded run.
McResult run_monte_carlo(const DgpConfig& config, std::span<const EstimatorSpec> estimators,
                         const McOptions& options);

enum class SweepAxis { N, Xi, S, Epsilon };

SweepAxis sweep_axis_parse(const std::string& name);
std::string sweep_axis_name(SweepAxis axis);

/// One Monte Carlo run per grid value, all sharing the same base seed so
/// comparisons across the grid are coupled. The Epsilon axis sets both oracle
/// error levels to the grid value and requires the Oracle policy.
std::vector<std::pair<double, McResult>> sweep(SweepAxis axis, std::span<const double> grid,
                                               const DgpConfig& base,
                                               std::span<const EstimatorSpec> estimators,
                                               const McOptions& options);

}  // namespace ace::simulate
