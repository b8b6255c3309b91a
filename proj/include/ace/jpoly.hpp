#pragma once

#include <span>
#include <vector>

#include "ace/cumulants.hpp"

namespace ace::jpoly {

/// Largest supported orthogonalization order.
inline constexpr int kMaxJOrder = 8;

/// The degree-r orthogonalizing polynomial J_r(w) = sum_i coeffs[i] w^i.
/// Built from the first r cumulants of the residual law; its k-th derivative
/// has expectation (under the true law) equal to a sum of products of
/// cumulant errors, which is what buys higher-order nuisance insensitivity.
struct JrPolynomial {
  int order = 0;                    // r
  std::vector<double> coeffs;       // ascending powers, size r + 1
  cumulants::CumulantSet cumulants; // the cumulants the coefficients came from

  double leading() const { return coeffs.back(); }
};

/// Closed-form coefficients from cumulants kappa_1..kappa_r:
///   coeff of w^{i-1} = 1/((i-1)!(r+1-i)!) * sum over set partitions pi of
///   [r+1-i] of (-1)^{|pi|} prod_B kappa_{|B|}   (the i = r+1 sum is empty: 1).
JrPolynomial j_closed_form(std::span<const double> kappa, int r);

/// Same construction, keeping the full estimated cumulant set (which may carry
/// diagnostic orders beyond r) attached to the polynomial.
JrPolynomial j_closed_form(const cumulants::CumulantSet& kappa, int r);

/// The same polynomial by the defining recursion: J_1(w) = w - mu_1 and
///   I_k(w) = int_0^w J_{k-1},  J_k = I_k - E[I_k],
/// with the expectations taken under the given raw moments mu_1..mu_r. This is
/// the independent construction route used to pin down j_closed_form.
JrPolynomial j_recursive(std::span<const double> mu, int r);

/// Coefficients of the k-th formal derivative, 0 <= k <= r + 1.
std::vector<double> j_derivative(const JrPolynomial& p, int k);

/// Horner evaluation.
double j_eval(const JrPolynomial& p, double w);
std::vector<double> j_eval_batch(const JrPolynomial& p, std::span<const double> w);
double poly_eval(std::span<const double> coeffs, double w);

/// (1/m!) * sum over set partitions pi of [m] of prod_B (kappa_{|B|} - kappa_hat_{|B|});
/// the closed form for E[J_r^{(k)}(eta)] with m = r - k. m = 0 returns 1.
double insensitivity_rhs(std::span<const double> kappa_true, std::span<const double> kappa_hat,
                         int m);

/// E[J_r^{(k)}(eta)] evaluated exactly under the raw moments of eta
/// (mu_0 = 1); the quantity insensitivity_rhs predicts.
double expected_j_derivative(const JrPolynomial& p, std::span<const double> mu, int k);

/// E[eta * J_r(eta)] under the raw moments of eta (needs mu_1..mu_{r+1}).
/// Equals kappa_{r+1}/r! when the polynomial is built from eta's own
/// cumulants; zero for Gaussian eta and r >= 2, which is the identification
/// failure behind the Gaussian treatment barrier.
double identification_value(const JrPolynomial& p, std::span<const double> mu);

}  // namespace ace::jpoly
