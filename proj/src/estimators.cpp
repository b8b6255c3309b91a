#include "ace/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "ace/common.hpp"
#include "ace/jpoly.hpp"

namespace ace::estimators {

namespace {

void check_predictors(const Dataset& data, const nuisance::LinearPredictor& g_hat,
                      const nuisance::LinearPredictor& q_hat) {
  if (g_hat.dim() != data.dim() || q_hat.dim() != data.dim()) {
    throw std::invalid_argument("estimator: predictor dimension mismatch");
  }
}

Dataset take_rows(const Dataset& data, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), data.dim());
  out.t.resize(static_cast<Eigen::Index>(rows.size()));
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = data.X.row(rows[i]);
    out.t[static_cast<Eigen::Index>(i)] = data.t[rows[i]];
    out.y[static_cast<Eigen::Index>(i)] = data.y[rows[i]];
  }
  return out;
}

struct MomentFoldSums {
  double numerator_sum = 0.0;    // sum (Y - qhat) J(T - ghat)
  double denominator_sum = 0.0;  // sum (T - ghat) J(T - ghat)
  Eigen::Index n = 0;
};

MomentFoldSums moment_fold_sums(const Dataset& fold, const nuisance::LinearPredictor& g_hat,
                                const nuisance::LinearPredictor& q_hat,
                                const jpoly::JrPolynomial& jr) {
  MomentFoldSums sums;
  KahanSum num;
  KahanSum den;
  for (Eigen::Index i = 0; i < fold.n(); ++i) {
    const double w = fold.t[i] - g_hat.predict(fold.X.row(i));
    const double jw = jpoly::j_eval(jr, w);
    num.add((fold.y[i] - q_hat.predict(fold.X.row(i))) * jw);
    den.add(w * jw);
  }
  sums.numerator_sum = num.value();
  sums.denominator_sum = den.value();
  sums.n = fold.n();
  return sums;
}

// Plug-in variance of the moment function at theta_hat:
//   (1/n) sum [Y - qhat - theta_hat (T - ghat)]^2 J(T - ghat)^2.
double plugin_variance(const Dataset& fold, const nuisance::LinearPredictor& g_hat,
                       const nuisance::LinearPredictor& q_hat, const jpoly::JrPolynomial& jr,
                       double theta_hat) {
  KahanSum acc;
  for (Eigen::Index i = 0; i < fold.n(); ++i) {
    const double w = fold.t[i] - g_hat.predict(fold.X.row(i));
    const double jw = jpoly::j_eval(jr, w);
    const double m = (fold.y[i] - q_hat.predict(fold.X.row(i)) - theta_hat * w) * jw;
    acc.add(m * m);
  }
  return acc.value() / static_cast<double>(fold.n());
}

// Scale used by the weak-identification gate: max(1, mean |T - ghat|^{r+1}).
double identification_scale(const Dataset& fold, const nuisance::LinearPredictor& g_hat, int r) {
  KahanSum acc;
  for (Eigen::Index i = 0; i < fold.n(); ++i) {
    const double w = std::abs(fold.t[i] - g_hat.predict(fold.X.row(i)));
    acc.add(std::pow(w, r + 1));
  }
  return std::max(1.0, acc.value() / static_cast<double>(fold.n()));
}

struct FoldEstimate {
  double theta = 0.0;
  double num_mean = 0.0;
  double den_mean = 0.0;
  double v_m = 0.0;
  double se = 0.0;
  cumulants::CumulantSet kappa;
  Eigen::Index n2 = 0;
};

FoldEstimate single_split_estimate(const Dataset& cumulant_fold, const Dataset& moment_fold,
                                   const nuisance::LinearPredictor& g_hat,
                                   const nuisance::LinearPredictor& q_hat, int r) {
  FoldEstimate fe;
  fe.kappa = cumulants::residual_cumulants(cumulant_fold, g_hat, r + 1);
  const jpoly::JrPolynomial jr = jpoly::j_closed_form(fe.kappa, r);

  const MomentFoldSums sums = moment_fold_sums(moment_fold, g_hat, q_hat, jr);
  const double n2 = static_cast<double>(sums.n);
  fe.n2 = sums.n;
  fe.num_mean = sums.numerator_sum / n2;
  fe.den_mean = sums.denominator_sum / n2;

  const double scale = identification_scale(moment_fold, g_hat, r);
  if (!(std::abs(fe.den_mean) >= 1e-12 * scale)) {
    throw WeakIdentificationError(
        "ace_estimate: empirical moment-equation denominator is numerically zero "
        "(order-" + std::to_string(r + 1) + " residual cumulant too small)",
        fe.den_mean);
  }

  // The moment equation is affine in theta, so the root is the ratio of sums.
  fe.theta = sums.numerator_sum / sums.denominator_sum;
  fe.v_m = plugin_variance(moment_fold, g_hat, q_hat, jr, fe.theta);
  fe.se = std::sqrt(fe.v_m / n2) / std::abs(fe.den_mean);
  return fe;
}

void attach_interval(AceEstimate& est, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0, 1)");
  const double z = normal_quantile(0.5 + level / 2.0);
  est.level = level;
  est.ci_lo = est.theta_hat - z * est.std_error;
  est.ci_hi = est.theta_hat + z * est.std_error;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0, 1)");
  static const boost::math::normal_distribution<double> standard_normal;
  return boost::math::quantile(standard_normal, p);
}

double dml_estimate(const Dataset& data, const nuisance::LinearPredictor& g_hat,
                    const nuisance::LinearPredictor& q_hat) {
  if (data.n() == 0) throw std::invalid_argument("dml_estimate: empty dataset");
  check_predictors(data, g_hat, q_hat);
  KahanSum num;
  KahanSum den;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double w = data.t[i] - g_hat.predict(data.X.row(i));
    num.add((data.y[i] - q_hat.predict(data.X.row(i))) * w);
    den.add(w * w);
  }
  if (!(den.value() > 0.0)) {
    throw DegenerateDesignError("dml_estimate: no treatment variation after residualization");
  }
  return num.value() / den.value();
}

AceEstimate dml_inference(const Dataset& data, const nuisance::LinearPredictor& g_hat,
                          const nuisance::LinearPredictor& q_hat, double level) {
  AceEstimate est;
  est.theta_hat = dml_estimate(data, g_hat, q_hat);
  KahanSum num;
  KahanSum den;
  KahanSum var;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double w = data.t[i] - g_hat.predict(data.X.row(i));
    const double e = data.y[i] - q_hat.predict(data.X.row(i));
    num.add(e * w);
    den.add(w * w);
    const double m = (e - est.theta_hat * w) * w;
    var.add(m * m);
  }
  const double n = static_cast<double>(data.n());
  est.numerator = num.value() / n;
  est.denominator = den.value() / n;
  est.v_m_hat = var.value() / n;
  est.std_error = std::sqrt(est.v_m_hat / n) / est.denominator;
  est.n_estimation = data.n();
  attach_interval(est, level);
  return est;
}

AceEstimate ace_estimate(const Dataset& data, const nuisance::LinearPredictor& g_hat,
                         const nuisance::LinearPredictor& q_hat, const AceConfig& config,
                         double level) {
  if (data.n() < 4) throw std::invalid_argument("ace_estimate: need at least 4 rows");
  check_predictors(data, g_hat, q_hat);
  if (config.order < 1 || config.order > jpoly::kMaxJOrder) {
    throw CapacityError("ace_estimate: order must be in [1, 8]");
  }
  if (!(config.split_fraction > 0.0 && config.split_fraction < 1.0)) {
    throw std::invalid_argument("ace_estimate: split_fraction must be in (0, 1)");
  }

  std::vector<Eigen::Index> rows(static_cast<std::size_t>(data.n()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  if (config.split == AceConfig::Split::Shuffled) {
    std::mt19937_64 rng(config.seed);
    std::shuffle(rows.begin(), rows.end(), rng);
  }
  const auto n1 = static_cast<std::size_t>(
      std::ceil(config.split_fraction * static_cast<double>(data.n())));
  if (n1 == 0 || n1 >= rows.size()) {
    throw std::invalid_argument("ace_estimate: split leaves an empty fold");
  }
  const auto split_at = rows.begin() + static_cast<std::ptrdiff_t>(n1);
  const Dataset fold1 = take_rows(data, std::vector<Eigen::Index>(rows.begin(), split_at));
  const Dataset fold2 = take_rows(data, std::vector<Eigen::Index>(split_at, rows.end()));

  const FoldEstimate a = single_split_estimate(fold1, fold2, g_hat, q_hat, config.order);

  AceEstimate est;
  est.cumulants = a.kappa;
  if (!config.swap_and_average) {
    est.theta_hat = a.theta;
    est.numerator = a.num_mean;
    est.denominator = a.den_mean;
    est.v_m_hat = a.v_m;
    est.std_error = a.se;
    est.n_estimation = a.n2;
  } else {
    const FoldEstimate b = single_split_estimate(fold2, fold1, g_hat, q_hat, config.order);
    est.theta_hat = 0.5 * (a.theta + b.theta);
    est.numerator = 0.5 * (a.num_mean + b.num_mean);
    est.denominator = 0.5 * (a.den_mean + b.den_mean);
    est.v_m_hat = 0.5 * (a.v_m + b.v_m);
    est.std_error = 0.5 * std::sqrt(a.se * a.se + b.se * b.se);
    est.n_estimation = a.n2 + b.n2;
  }
  attach_interval(est, level);
  return est;
}

std::pair<double, double> confidence_interval(const AceEstimate& est, double level) {
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must be in (0, 1)");
  const double z = normal_quantile(0.5 + level / 2.0);
  return {est.theta_hat - z * est.std_error, est.theta_hat + z * est.std_error};
}

}  // namespace ace::estimators
