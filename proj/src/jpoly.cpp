#include "ace/jpoly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ace/common.hpp"
#include "ace/partitions.hpp"

namespace ace::jpoly {

namespace {

void check_order(int r) {
  if (r < 1 || r > kMaxJOrder) {
    throw CapacityError("jpoly: order must be in [1, " + std::to_string(kMaxJOrder) + "]");
  }
}

double dfact(int n) { return static_cast<double>(factorial(n)); }

}  // namespace

JrPolynomial j_closed_form(std::span<const double> kappa, int r) {
  check_order(r);
  if (static_cast<int>(kappa.size()) < r) {
    throw std::invalid_argument("j_closed_form: cumulants must cover orders 1..r");
  }
  JrPolynomial p;
  p.order = r;
  p.coeffs.resize(static_cast<std::size_t>(r) + 1);
  for (int i = 1; i <= r + 1; ++i) {
    const double signed_sum = partitions::partition_weighted_sum(
        r + 1 - i, kappa, partitions::SignMode::AlternatingBlocks);
    p.coeffs[i - 1] = signed_sum / (dfact(i - 1) * dfact(r + 1 - i));
  }
  p.cumulants.values.assign(kappa.begin(), kappa.begin() + r);
  p.cumulants.source_moments = cumulants::cumulants_to_moments(kappa.first(r));
  return p;
}

JrPolynomial j_closed_form(const cumulants::CumulantSet& kappa, int r) {
  JrPolynomial p = j_closed_form(std::span<const double>(kappa.values), r);
  p.cumulants = kappa;
  return p;
}

JrPolynomial j_recursive(std::span<const double> mu, int r) {
  check_order(r);
  if (static_cast<int>(mu.size()) < r) {
    throw std::invalid_argument("j_recursive: moments must cover orders 1..r");
  }
  // J_1(w) = w - mu_1.
  std::vector<double> coeffs{-mu[0], 1.0};
  for (int k = 2; k <= r; ++k) {
    // I_k = antiderivative of J_{k-1} with I_k(0) = 0.
    std::vector<double> integral(coeffs.size() + 1, 0.0);
    for (std::size_t d = 0; d < coeffs.size(); ++d) {
      integral[d + 1] = coeffs[d] / static_cast<double>(d + 1);
    }
    // Center: J_k = I_k - E[I_k(eta)], with E[w^d] = mu_d.
    KahanSum expectation;
    for (std::size_t d = 1; d < integral.size(); ++d) expectation.add(integral[d] * mu[d - 1]);
    integral[0] = -expectation.value();
    coeffs = std::move(integral);
  }
  JrPolynomial p;
  p.order = r;
  p.coeffs = std::move(coeffs);
  cumulants::MomentSequence ms;
  ms.origin = cumulants::MomentSequence::Origin::Exact;
  ms.values.assign(mu.begin(), mu.begin() + r);
  p.cumulants = cumulants::moments_to_cumulants(ms);
  return p;
}

std::vector<double> j_derivative(const JrPolynomial& p, int k) {
  if (k < 0 || k > p.order + 1) {
    throw std::invalid_argument("j_derivative: k must be in [0, r + 1]");
  }
  std::vector<double> d = p.coeffs;
  for (int pass = 0; pass < k; ++pass) {
    if (d.size() <= 1) {
      d = {0.0};
      break;
    }
    std::vector<double> next(d.size() - 1);
    for (std::size_t i = 1; i < d.size(); ++i) next[i - 1] = d[i] * static_cast<double>(i);
    d = std::move(next);
  }
  return d;
}

double poly_eval(std::span<const double> coeffs, double w) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * w + coeffs[i];
  return acc;
}

double j_eval(const JrPolynomial& p, double w) {
  if (!std::isfinite(w)) throw std::invalid_argument("j_eval: non-finite input");
  return poly_eval(p.coeffs, w);
}

std::vector<double> j_eval_batch(const JrPolynomial& p, std::span<const double> w) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = j_eval(p, w[i]);
  return out;
}

double insensitivity_rhs(std::span<const double> kappa_true, std::span<const double> kappa_hat,
                         int m) {
  if (m < 0) throw std::invalid_argument("insensitivity_rhs: m must be >= 0");
  if (static_cast<int>(kappa_true.size()) < m || static_cast<int>(kappa_hat.size()) < m) {
    throw std::invalid_argument("insensitivity_rhs: cumulant sequences must cover orders 1..m");
  }
  std::vector<double> diff(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) diff[j] = kappa_true[j] - kappa_hat[j];
  return partitions::partition_weighted_sum(m, diff, partitions::SignMode::Unsigned) / dfact(m);
}

double expected_j_derivative(const JrPolynomial& p, std::span<const double> mu, int k) {
  const std::vector<double> d = j_derivative(p, k);
  if (static_cast<int>(mu.size()) + 1 < static_cast<int>(d.size())) {
    throw std::invalid_argument("expected_j_derivative: not enough moments");
  }
  KahanSum acc;
  acc.add(d[0]);  // mu_0 = 1
  for (std::size_t i = 1; i < d.size(); ++i) acc.add(d[i] * mu[i - 1]);
  return acc.value();
}

double identification_value(const JrPolynomial& p, std::span<const double> mu) {
  if (static_cast<int>(mu.size()) < p.order + 1) {
    throw std::invalid_argument("identification_value: needs moments up to order r + 1");
  }
  // E[eta J_r(eta)] = sum_i coeff_{i} mu_{i+1}.
  KahanSum acc;
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) acc.add(p.coeffs[i] * mu[i]);
  return acc.value();
}

}  // namespace ace::jpoly
