#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ace/dataset.hpp"
#include "ace/nuisance.hpp"

namespace ace::cumulants {

/// Raw moments mu'_1..mu'_K of a sample or an exact distribution.
struct MomentSequence {
  enum class Origin { Empirical, Exact };

  std::vector<double> values;   // values[k-1] = mu'_k
  Origin origin = Origin::Exact;
  std::size_t sample_count = 0; // meaningful for Empirical

  int max_order() const { return static_cast<int>(values.size()); }
  double moment(int k) const { return values.at(static_cast<std::size_t>(k) - 1); }
};

/// Cumulants kappa_1..kappa_K together with the moments they came from.
struct CumulantSet {
  std::vector<double> values;   // values[k-1] = kappa_k
  MomentSequence source_moments;

  int max_order() const { return static_cast<int>(values.size()); }
  double cumulant(int k) const { return values.at(static_cast<std::size_t>(k) - 1); }
};

/// mu'_k = (1/n) sum_i s_i^k for k = 1..max_order, compensated summation.
MomentSequence raw_moments(std::span<const double> samples, int max_order);

/// kappa_k = mu'_k - sum_{j=1}^{k-1} C(k-1, j-1) mu'_{k-j} kappa_j.
CumulantSet moments_to_cumulants(const MomentSequence& moments);

/// mu_m = sum over set partitions of [m] of prod_B kappa_{|B|}, for m = 1..K.
MomentSequence cumulants_to_moments(std::span<const double> cumulants);

/// Cumulants of the empirical residual distribution (1/n) sum_i delta_{T_i - ghat(X_i)}.
/// Orders >= 2 are computed from residuals centered at their lower median, so
/// they are invariant under any constant offset in ghat that shifts each
/// residual exactly; kappa_1 is the plain residual mean.
CumulantSet residual_cumulants(const Dataset& data, const nuisance::LinearPredictor& g_hat,
                               int max_order);

/// Debiased residual moments: theta_1 = 0, theta_k = mu'_k - k theta_{k-1} mu'_1.
std::vector<double> debiased_moments(const MomentSequence& moments);

/// The two cubic statistics for the correlated-noise robustness study:
/// psi = mu3 - 3 mu2 mu1 (third cumulant plug-in) and nu = mu3 (naive).
struct CubicEstimators {
  double psi;
  double nu;
};
CubicEstimators cubic_estimators(std::span<const double> residuals);

}  // namespace ace::cumulants
