#include "ace/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "ace/common.hpp"

namespace ace::simulate {

namespace {

// Stream tags for per-replicate seed derivation.
enum : std::uint64_t {
  kStreamX = 1,
  kStreamEta = 2,
  kStreamOutcomeNoise = 3,
  kStreamSupportG = 4,
  kStreamSupportF = 5,
  kStreamAux = 6,
  kStreamSplit = 7,
  kStreamOracleG = 8,
  kStreamOracleQ = 9,
};

std::vector<Eigen::Index> seeded_support(Eigen::Index p, Eigen::Index s, std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(s));
  std::sort(idx.begin(), idx.end());
  return idx;
}

double sample_noise(const NoiseSpec& noise, std::mt19937_64& rng) {
  switch (noise.kind) {
    case NoiseSpec::Kind::Gaussian: {
      std::normal_distribution<double> d(0.0, noise.sigma);
      return d(rng);
    }
    case NoiseSpec::Kind::Uniform: {
      std::uniform_real_distribution<double> d(-noise.half_width, noise.half_width);
      return d(rng);
    }
    case NoiseSpec::Kind::DemandDiscrete:
    case NoiseSpec::Kind::Custom: {
      std::uniform_real_distribution<double> d(0.0, 1.0);
      const double u = d(rng);
      double cum = 0.0;
      for (std::size_t i = 0; i < noise.points.size(); ++i) {
        cum += noise.probs[i];
        if (u < cum) return noise.points[i];
      }
      return noise.points.back();
    }
  }
  throw std::logic_error("sample_noise: unknown kind");
}

}  // namespace

NoiseSpec NoiseSpec::demand_discrete() {
  NoiseSpec n;
  n.kind = Kind::DemandDiscrete;
  n.points = {0.5, 0.0, -1.5, -3.5};
  n.probs = {0.65, 0.2, 0.1, 0.05};
  return n;
}

NoiseSpec NoiseSpec::gaussian(double sigma) {
  NoiseSpec n;
  n.kind = Kind::Gaussian;
  n.sigma = sigma;
  return n;
}

NoiseSpec NoiseSpec::uniform(double half_width) {
  NoiseSpec n;
  n.kind = Kind::Uniform;
  n.half_width = half_width;
  return n;
}

NoiseSpec NoiseSpec::custom(std::vector<double> points, std::vector<double> probs) {
  NoiseSpec n;
  n.kind = Kind::Custom;
  n.points = std::move(points);
  n.probs = std::move(probs);
  return n;
}

void NoiseSpec::validate() const {
  switch (kind) {
    case Kind::Gaussian:
      if (!(sigma > 0.0)) throw std::invalid_argument("noise: sigma must be > 0");
      return;
    case Kind::Uniform:
      if (!(half_width > 0.0)) throw std::invalid_argument("noise: half_width must be > 0");
      return;
    case Kind::DemandDiscrete:
    case Kind::Custom: {
      if (points.empty() || points.size() != probs.size()) {
        throw std::invalid_argument("noise: points and probs must be nonempty and equal length");
      }
      KahanSum total;
      KahanSum mean;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(probs[i] >= 0.0)) throw std::invalid_argument("noise: negative probability");
        total.add(probs[i]);
        mean.add(probs[i] * points[i]);
      }
      if (std::abs(total.value() - 1.0) > 1e-12) {
        throw std::invalid_argument("noise: probabilities must sum to 1");
      }
      if (std::abs(mean.value()) > 1e-12) {
        throw std::invalid_argument("noise: law must have mean zero");
      }
      return;
    }
  }
  throw std::logic_error("noise: unknown kind");
}

std::vector<double> NoiseSpec::exact_moments(int max_order) const {
  validate();
  std::vector<double> mu(static_cast<std::size_t>(max_order), 0.0);
  switch (kind) {
    case Kind::Gaussian:
      // mu_{2m} = sigma^{2m} (2m-1)!!, odd moments vanish.
      for (int k = 2; k <= max_order; k += 2) {
        double dfact_odd = 1.0;
        for (int j = 1; j < k; j += 2) dfact_odd *= static_cast<double>(j);
        mu[k - 1] = std::pow(sigma, k) * dfact_odd;
      }
      return mu;
    case Kind::Uniform:
      for (int k = 2; k <= max_order; k += 2) {
        mu[k - 1] = std::pow(half_width, k) / static_cast<double>(k + 1);
      }
      return mu;
    case Kind::DemandDiscrete:
    case Kind::Custom:
      for (int k = 1; k <= max_order; ++k) {
        KahanSum acc;
        for (std::size_t i = 0; i < points.size(); ++i) {
          acc.add(probs[i] * std::pow(points[i], k));
        }
        mu[k - 1] = acc.value();
      }
      return mu;
  }
  throw std::logic_error("noise: unknown kind");
}

void DgpConfig::validate() const {
  if (n < 1) throw std::invalid_argument("dgp: n must be >= 1");
  if (p < 1) throw std::invalid_argument("dgp: p must be >= 1");
  if (s < 0 || s > p) throw std::invalid_argument("dgp: s must satisfy 0 <= s <= p");
  noise.validate();
}

Dataset gen_dataset(const DgpConfig& config, const DgpTruth& truth) {
  config.validate();
  if (truth.g0.dim() != config.p || truth.f0.dim() != config.p) {
    throw std::invalid_argument("gen_dataset: truth dimension mismatch");
  }

  Dataset data;
  data.X.resize(config.n, config.p);
  data.t.resize(config.n);
  data.y.resize(config.n);

  std::mt19937_64 rng_x(derive_seed(config.seed, kStreamX));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < config.n; ++i) {
    for (Eigen::Index j = 0; j < config.p; ++j) data.X(i, j) = gauss(rng_x);
  }

  std::mt19937_64 rng_eta(derive_seed(config.seed, kStreamEta));
  std::mt19937_64 rng_xi(derive_seed(config.seed, kStreamOutcomeNoise));
  std::uniform_real_distribution<double> outcome_noise(-3.0, 3.0);
  for (Eigen::Index i = 0; i < config.n; ++i) {
    const double eta = sample_noise(config.noise, rng_eta);
    const double t = truth.g0.predict(data.X.row(i)) + (1.0 + config.xi * data.X(i, 0)) * eta;
    data.t[i] = t;
    data.y[i] = config.theta0 * t + truth.f0.predict(data.X.row(i)) + outcome_noise(rng_xi);
  }
  return data;
}

std::pair<Dataset, DgpTruth> gen_dataset(const DgpConfig& config) {
  config.validate();

  DgpTruth truth;
  truth.theta0 = config.theta0;
  truth.g0.coef = Eigen::VectorXd::Zero(config.p);
  truth.f0.coef = Eigen::VectorXd::Zero(config.p);
  for (Eigen::Index j : seeded_support(config.p, config.s, derive_seed(config.seed, kStreamSupportG))) {
    truth.g0.coef[j] = config.coef_scale;
  }
  for (Eigen::Index j : seeded_support(config.p, config.s, derive_seed(config.seed, kStreamSupportF))) {
    truth.f0.coef[j] = config.coef_scale;
  }
  truth.q0.coef = truth.f0.coef + config.theta0 * truth.g0.coef;
  truth.q0.intercept = truth.f0.intercept + config.theta0 * truth.g0.intercept;

  Dataset data = gen_dataset(config, truth);
  return {std::move(data), std::move(truth)};
}

std::string EstimatorSpec::label() const {
  if (kind == Kind::Dml) return "dml";
  return "ace" + std::to_string(order);
}

EstimatorSpec EstimatorSpec::parse(const std::string& label) {
  if (label == "dml") return {Kind::Dml, 1};
  if (label.rfind("ace", 0) == 0 && label.size() > 3) {
    const int order = std::stoi(label.substr(3));
    if (order >= 1 && order <= 8) return {Kind::Ace, order};
  }
  throw std::invalid_argument("unknown estimator '" + label + "' (expected dml or ace1..ace8)");
}

namespace {

struct FittedNuisances {
  nuisance::LinearPredictor g_hat;
  nuisance::LinearPredictor q_hat;
};

FittedNuisances fit_lasso_nuisances(const Dataset& train, const NuisancePolicy& policy) {
  auto pick_lambda = [&](const Eigen::VectorXd& target) {
    if (policy.cv) return nuisance::lasso_cv_lambda(train.X, target, policy.lasso);
    if (policy.lambda >= 0.0) return policy.lambda;
    return nuisance::lambda_default(train.X, target, policy.lambda_c);
  };
  FittedNuisances out;
  nuisance::LassoConfig cfg_g = policy.lasso;
  cfg_g.lambda = pick_lambda(train.t);
  out.g_hat = nuisance::lasso_fit(train.X, train.t, cfg_g).predictor;
  nuisance::LassoConfig cfg_q = policy.lasso;
  cfg_q.lambda = pick_lambda(train.y);
  out.q_hat = nuisance::lasso_fit(train.X, train.y, cfg_q).predictor;
  return out;
}

struct ReplicateOutcome {
  // One entry per estimator, in the caller's estimator order.
  std::vector<ReplicateRow> rows;
};

ReplicateOutcome run_replicate(const DgpConfig& base, std::span<const EstimatorSpec> estimators,
                               const McOptions& options, int replicate) {
  DgpConfig config = base;
  config.seed = derive_seed(options.base_seed, static_cast<std::uint64_t>(replicate));

  auto [data, truth] = gen_dataset(config);

  FittedNuisances nuis;
  Dataset estimation_data;
  if (options.policy.kind == NuisancePolicy::Kind::Oracle) {
    nuis.g_hat = nuisance::oracle_nuisance(truth.g0, options.policy.epsilon1, options.policy.mode,
                                           derive_seed(config.seed, kStreamOracleG));
    nuis.q_hat = nuisance::oracle_nuisance(truth.q0, options.policy.epsilon2, options.policy.mode,
                                           derive_seed(config.seed, kStreamOracleQ));
    estimation_data = std::move(data);
  } else if (options.protocol == McOptions::Protocol::AuxiliarySample) {
    DgpConfig aux = config;
    aux.seed = derive_seed(config.seed, kStreamAux);
    const Dataset aux_data = gen_dataset(aux, truth);
    nuis = fit_lasso_nuisances(aux_data, options.policy);
    estimation_data = std::move(data);
  } else {
    // Three-way split: first half trains the nuisances, second half estimates.
    const Eigen::Index n_train = data.n() / 2;
    Dataset train{data.X.topRows(n_train), data.t.head(n_train), data.y.head(n_train)};
    estimation_data = Dataset{data.X.bottomRows(data.n() - n_train),
                              data.t.tail(data.n() - n_train), data.y.tail(data.n() - n_train)};
    nuis = fit_lasso_nuisances(train, options.policy);
  }

  ReplicateOutcome outcome;
  outcome.rows.reserve(estimators.size());
  for (const EstimatorSpec& spec : estimators) {
    ReplicateRow row;
    row.replicate = replicate;
    row.estimator = spec.label();
    try {
      estimators::AceEstimate est;
      if (spec.kind == EstimatorSpec::Kind::Dml) {
        est = estimators::dml_inference(estimation_data, nuis.g_hat, nuis.q_hat, options.level);
      } else {
        estimators::AceConfig cfg;
        cfg.order = spec.order;
        cfg.seed = derive_seed(config.seed, kStreamSplit);
        est = estimators::ace_estimate(estimation_data, nuis.g_hat, nuis.q_hat, cfg, options.level);
      }
      row.theta_hat = est.theta_hat;
      row.std_error = est.std_error;
      row.ci_lo = est.ci_lo;
      row.ci_hi = est.ci_hi;
      row.covered = est.ci_lo <= truth.theta0 && truth.theta0 <= est.ci_hi;
    } catch (const WeakIdentificationError&) {
      row.failed = true;
    } catch (const DegenerateDesignError&) {
      row.failed = true;
    }
    if (row.failed) {
      row.theta_hat = row.std_error = row.ci_lo = row.ci_hi =
          std::numeric_limits<double>::quiet_NaN();
      row.covered = false;
    }
    outcome.rows.push_back(std::move(row));
  }
  return outcome;
}

}  // namespace

McResult run_monte_carlo(const DgpConfig& config, std::span<const EstimatorSpec> estimators,
                         const McOptions& options) {
  if (options.reps < 1) throw std::invalid_argument("run_monte_carlo: reps must be >= 1");
  if (estimators.empty()) throw std::invalid_argument("run_monte_carlo: no estimators");
  config.validate();

  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(options.reps));
  int threads = options.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, options.reps));

  if (threads == 1) {
    for (int k = 0; k < options.reps; ++k) {
      outcomes[static_cast<std::size_t>(k)] = run_replicate(config, estimators, options, k);
    }
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const int k = next.fetch_add(1);
        if (k >= options.reps) return;
        try {
          outcomes[static_cast<std::size_t>(k)] = run_replicate(config, estimators, options, k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  McResult result;
  result.report.theta0 = config.theta0;
  result.report.reps_requested = options.reps;
  result.estimates.reserve(outcomes.size() * estimators.size());
  for (const auto& outcome : outcomes) {
    for (const auto& row : outcome.rows) result.estimates.push_back(row);
  }

  for (std::size_t e = 0; e < estimators.size(); ++e) {
    McRow agg;
    agg.estimator = estimators[e].label();
    std::vector<double> thetas;
    thetas.reserve(outcomes.size());
    KahanSum width;
    int covered = 0;
    for (const auto& outcome : outcomes) {
      const ReplicateRow& row = outcome.rows[e];
      if (row.failed) {
        ++agg.failures;
        continue;
      }
      thetas.push_back(row.theta_hat);
      width.add(row.ci_hi - row.ci_lo);
      if (row.covered) ++covered;
    }
    agg.replicates = static_cast<int>(thetas.size());
    if (!thetas.empty()) {
      const double m = static_cast<double>(thetas.size());
      const double mean = kahan_mean(thetas);
      KahanSum var;
      KahanSum mse;
      for (double th : thetas) {
        var.add((th - mean) * (th - mean));
        mse.add((th - config.theta0) * (th - config.theta0));
      }
      agg.bias = mean - config.theta0;
      agg.sd = std::sqrt(var.value() / m);
      agg.rmse = std::sqrt(mse.value() / m);
      agg.coverage = static_cast<double>(covered) / m;
      agg.mean_ci_width = width.value() / m;
    }
    agg.high_failure_rate = agg.failures > 0.01 * static_cast<double>(options.reps);
    result.report.rows.push_back(std::move(agg));
  }
  return result;
}

SweepAxis sweep_axis_parse(const std::string& name) {
  if (name == "n") return SweepAxis::N;
  if (name == "xi") return SweepAxis::Xi;
  if (name == "s") return SweepAxis::S;
  if (name == "epsilon") return SweepAxis::Epsilon;
  throw std::invalid_argument("unknown sweep axis '" + name + "'");
}

std::string sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::N: return "n";
    case SweepAxis::Xi: return "xi";
    case SweepAxis::S: return "s";
    case SweepAxis::Epsilon: return "epsilon";
  }
  return "?";
}

std::vector<std::pair<double, McResult>> sweep(SweepAxis axis, std::span<const double> grid,
                                               const DgpConfig& base,
                                               std::span<const EstimatorSpec> estimators,
                                               const McOptions& options) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  std::vector<std::pair<double, McResult>> out;
  out.reserve(grid.size());
  for (double value : grid) {
    DgpConfig config = base;
    McOptions opts = options;
    switch (axis) {
      case SweepAxis::N:
        config.n = static_cast<Eigen::Index>(value);
        break;
      case SweepAxis::Xi:
        config.xi = value;
        break;
      case SweepAxis::S:
        config.s = static_cast<Eigen::Index>(value);
        break;
      case SweepAxis::Epsilon:
        if (opts.policy.kind != NuisancePolicy::Kind::Oracle) {
          throw std::invalid_argument("sweep: epsilon axis requires the oracle nuisance policy");
        }
        opts.policy.epsilon1 = value;
        opts.policy.epsilon2 = value;
        break;
    }
    out.emplace_back(value, run_monte_carlo(config, estimators, opts));
  }
  return out;
}

}  // namespace ace::simulate
