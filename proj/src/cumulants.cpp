#include "ace/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ace/common.hpp"
#include "ace/partitions.hpp"

namespace ace::cumulants {

namespace {

// Binomial coefficients up to the orders the recursions need; exact in double
// for n <= 20.
double binom(int n, int k) {
  return static_cast<double>(factorial(n)) /
         (static_cast<double>(factorial(k)) * static_cast<double>(factorial(n - k)));
}

std::vector<double> moment_to_cumulant_recursion(const std::vector<double>& mu) {
  const int K = static_cast<int>(mu.size());
  std::vector<double> kappa(K);
  for (int k = 1; k <= K; ++k) {
    KahanSum acc;
    acc.add(mu[k - 1]);
    for (int j = 1; j <= k - 1; ++j) acc.add(-binom(k - 1, j - 1) * mu[k - j - 1] * kappa[j - 1]);
    kappa[k - 1] = acc.value();
  }
  return kappa;
}

}  // namespace

MomentSequence raw_moments(std::span<const double> samples, int max_order) {
  if (samples.empty()) throw std::invalid_argument("raw_moments: empty sample");
  if (max_order < 1) throw std::invalid_argument("raw_moments: max_order must be >= 1");

  std::vector<KahanSum> acc(static_cast<std::size_t>(max_order));
  for (double s : samples) {
    double power = 1.0;
    for (int k = 0; k < max_order; ++k) {
      power *= s;
      acc[k].add(power);
    }
  }
  MomentSequence out;
  out.origin = MomentSequence::Origin::Empirical;
  out.sample_count = samples.size();
  out.values.resize(static_cast<std::size_t>(max_order));
  const double n = static_cast<double>(samples.size());
  for (int k = 0; k < max_order; ++k) out.values[k] = acc[k].value() / n;
  if (max_order >= 2) {
    // Cauchy-Schwarz on the sample itself; can only fail through a bug.
    const double m1 = out.values[0];
    const double m2 = out.values[1];
    if (m2 < m1 * m1 - 1e-10 * std::max(1.0, std::abs(m2))) {
      throw std::logic_error("raw_moments: mu'_2 < mu'_1^2 on an empirical sample");
    }
  }
  return out;
}

CumulantSet moments_to_cumulants(const MomentSequence& moments) {
  if (moments.values.empty()) throw std::invalid_argument("moments_to_cumulants: no moments");
  CumulantSet out;
  out.values = moment_to_cumulant_recursion(moments.values);
  out.source_moments = moments;
  return out;
}

MomentSequence cumulants_to_moments(std::span<const double> kappa) {
  if (kappa.empty()) throw std::invalid_argument("cumulants_to_moments: no cumulants");
  MomentSequence out;
  out.origin = MomentSequence::Origin::Exact;
  out.values.resize(kappa.size());
  for (int m = 1; m <= static_cast<int>(kappa.size()); ++m) {
    out.values[m - 1] = partitions::partition_weighted_sum(m, kappa, partitions::SignMode::Unsigned);
  }
  return out;
}

CumulantSet residual_cumulants(const Dataset& data, const nuisance::LinearPredictor& g_hat,
                               int max_order) {
  if (data.n() == 0) throw std::invalid_argument("residual_cumulants: empty dataset");
  if (g_hat.dim() != data.dim()) {
    throw std::invalid_argument("residual_cumulants: predictor dimension mismatch");
  }
  std::vector<double> residuals(static_cast<std::size_t>(data.n()));
  for (Eigen::Index i = 0; i < data.n(); ++i) residuals[i] = data.t[i] - g_hat.predict(data.X.row(i));

  // Lower median as the centering point. A sample value keeps orders >= 2
  // invariant under any per-element-exact shift of the residuals.
  std::vector<double> sorted = residuals;
  const auto mid = sorted.begin() + (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double center = *mid;

  std::vector<double> centered(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) centered[i] = residuals[i] - center;

  CumulantSet out = moments_to_cumulants(raw_moments(centered, max_order));
  out.values[0] = kahan_mean(residuals);
  out.source_moments = raw_moments(residuals, max_order);
  return out;
}

std::vector<double> debiased_moments(const MomentSequence& moments) {
  const int K = moments.max_order();
  if (K < 1) throw std::invalid_argument("debiased_moments: no moments");
  std::vector<double> theta(static_cast<std::size_t>(K));
  theta[0] = 0.0;
  for (int k = 2; k <= K; ++k) {
    theta[k - 1] = moments.values[k - 1] - k * theta[k - 2] * moments.values[0];
  }
  return theta;
}

CubicEstimators cubic_estimators(std::span<const double> residuals) {
  const MomentSequence mu = raw_moments(residuals, 3);
  return {mu.values[2] - 3.0 * mu.values[1] * mu.values[0], mu.values[2]};
}

}  // namespace ace::cumulants
