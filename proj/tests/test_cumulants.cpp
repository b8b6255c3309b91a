#include "ace/cumulants.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "ace/common.hpp"
#include "doctest.h"

using namespace ace;
using namespace ace::cumulants;

namespace {

// The four-point discount law used throughout: {0.5, 0, -1.5, -3.5} with
// probabilities {0.65, 0.2, 0.1, 0.05}. Exact raw moments by direct weighting.
const std::vector<double> kPoints{0.5, 0.0, -1.5, -3.5};
const std::vector<double> kProbs{0.65, 0.2, 0.1, 0.05};

std::vector<double> four_point_moments(int max_order) {
  std::vector<double> mu(static_cast<std::size_t>(max_order), 0.0);
  for (int k = 1; k <= max_order; ++k) {
    for (std::size_t i = 0; i < kPoints.size(); ++i) mu[k - 1] += kProbs[i] * std::pow(kPoints[i], k);
  }
  return mu;
}

MomentSequence exact_moments(std::vector<double> values) {
  MomentSequence ms;
  ms.origin = MomentSequence::Origin::Exact;
  ms.values = std::move(values);
  return ms;
}

Dataset residual_only_dataset(const std::vector<double>& t_values) {
  Dataset d;
  const auto n = static_cast<Eigen::Index>(t_values.size());
  d.X = Eigen::MatrixXd::Zero(n, 1);
  d.t = Eigen::Map<const Eigen::VectorXd>(t_values.data(), n);
  d.y = Eigen::VectorXd::Zero(n);
  return d;
}

nuisance::LinearPredictor constant_predictor(double intercept, Eigen::Index p = 1) {
  nuisance::LinearPredictor g;
  g.intercept = intercept;
  g.coef = Eigen::VectorXd::Zero(p);
  return g;
}

std::vector<double> sample_four_point(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) {
    const double u = unif(rng);
    if (u < 0.65) v = 0.5;
    else if (u < 0.85) v = 0.0;
    else if (u < 0.95) v = -1.5;
    else v = -3.5;
  }
  return out;
}

}  // namespace

TEST_CASE("raw moments") {
  SUBCASE("symmetric two-point sample") {
    const std::vector<double> s{-1.0, 1.0};
    const MomentSequence mu = raw_moments(s, 4);
    CHECK(mu.values == std::vector<double>{0.0, 1.0, 0.0, 1.0});
    CHECK(mu.origin == MomentSequence::Origin::Empirical);
    CHECK(mu.sample_count == 2);
  }
  SUBCASE("weighted four-point sample has unit variance") {
    std::vector<double> s;
    for (int i = 0; i < 65; ++i) s.push_back(0.5);
    for (int i = 0; i < 20; ++i) s.push_back(0.0);
    for (int i = 0; i < 10; ++i) s.push_back(-1.5);
    for (int i = 0; i < 5; ++i) s.push_back(-3.5);
    const MomentSequence mu = raw_moments(s, 2);
    CHECK(mu.values[0] == 0.0);
    CHECK(mu.values[1] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("constant sample") {
    const std::vector<double> s{2.0, 2.0, 2.0};
    CHECK(raw_moments(s, 3).values == std::vector<double>{2.0, 4.0, 8.0});
  }
  SUBCASE("empty sample is rejected") {
    CHECK_THROWS_AS(raw_moments(std::vector<double>{}, 2), std::invalid_argument);
  }
}

TEST_CASE("moments to cumulants") {
  SUBCASE("Gaussian moments leave only the variance") {
    const double s2 = 1.7;
    const CumulantSet k = moments_to_cumulants(exact_moments({0.0, s2, 0.0, 3.0 * s2 * s2}));
    CHECK(k.values[0] == 0.0);
    CHECK(k.values[1] == doctest::Approx(s2).epsilon(1e-15));
    CHECK(k.values[2] == doctest::Approx(0.0).scale(1.0));
    CHECK(k.values[3] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
  SUBCASE("four-point law cumulants") {
    const CumulantSet k = moments_to_cumulants(exact_moments(four_point_moments(4)));
    CHECK(k.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(k.values[2] == doctest::Approx(-2.4).epsilon(1e-14));
    CHECK(k.values[3] == doctest::Approx(5.05).epsilon(1e-14));
  }
  SUBCASE("constant law degenerates") {
    const double c = -0.8;
    const CumulantSet k =
        moments_to_cumulants(exact_moments({c, c * c, c * c * c, c * c * c * c}));
    CHECK(k.values[0] == c);
    for (int j = 1; j < 4; ++j) CHECK(k.values[j] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  }
}

TEST_CASE("cumulants to moments") {
  SUBCASE("standard Gaussian") {
    const MomentSequence mu = cumulants_to_moments(std::vector<double>{0.0, 1.0, 0.0, 0.0});
    CHECK(mu.values == std::vector<double>{0.0, 1.0, 0.0, 3.0});
  }
  SUBCASE("point mass") {
    const double c = 1.5;
    const MomentSequence mu = cumulants_to_moments(std::vector<double>{c, 0.0, 0.0, 0.0, 0.0});
    for (int m = 1; m <= 5; ++m) CHECK(mu.values[m - 1] == doctest::Approx(std::pow(c, m)).epsilon(1e-14));
  }
  SUBCASE("four-point law fourth moment") {
    const MomentSequence mu = cumulants_to_moments(std::vector<double>{0.0, 1.0, -2.4, 5.05});
    CHECK(mu.values[3] == doctest::Approx(8.05).epsilon(1e-14));
  }
}

TEST_CASE("moment/cumulant round trip at orders up to 8") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> kappa(8);
    for (auto& v : kappa) v = unif(rng);
    const MomentSequence mu = cumulants_to_moments(kappa);
    const CumulantSet back = moments_to_cumulants(mu);
    for (int j = 0; j < 8; ++j) {
      CHECK(back.values[j] ==
            doctest::Approx(kappa[j]).epsilon(1e-10).scale(std::max(1.0, std::abs(kappa[j]))));
    }
  }
}

TEST_CASE("residual cumulants") {
  SUBCASE("recovers the four-point cumulants under the true nuisance") {
    const auto sample = sample_four_point(100000, 77);
    const Dataset d = residual_only_dataset(sample);
    const CumulantSet k = residual_cumulants(d, constant_predictor(0.0), 4);
    CHECK(std::abs(k.values[1] - 1.0) < 0.05);
    CHECK(std::abs(k.values[2] - (-2.4)) < 0.15);
  }
  SUBCASE("orders >= 2 are bit-identical under an exact constant offset") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const auto sample = sample_four_point(5000, seed);
      const Dataset d = residual_only_dataset(sample);
      const CumulantSet base = residual_cumulants(d, constant_predictor(0.0), 6);
      const CumulantSet shifted = residual_cumulants(d, constant_predictor(1.0), 6);
      for (int j = 1; j < 6; ++j) CHECK(base.values[j] == shifted.values[j]);
      CHECK(shifted.values[0] == doctest::Approx(base.values[0] - 1.0).epsilon(1e-12));
    }
  }
  SUBCASE("approximately invariant under a generic offset") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss(0.0, 1.3);
    std::vector<double> sample(4000);
    for (auto& v : sample) v = gauss(rng);
    const Dataset d = residual_only_dataset(sample);
    const CumulantSet base = residual_cumulants(d, constant_predictor(0.0), 5);
    const CumulantSet shifted = residual_cumulants(d, constant_predictor(0.3717), 5);
    for (int j = 1; j < 5; ++j) {
      CHECK(shifted.values[j] ==
            doctest::Approx(base.values[j]).epsilon(1e-11).scale(std::max(1.0, std::abs(base.values[j]))));
    }
  }
  SUBCASE("independent noise adds in cumulants") {
    // eta from the four-point law, delta uniform on [-1, 1]; the cumulants of
    // the sum are the sums of cumulants. Tolerances are 5x the Monte Carlo SD
    // of each estimated cumulant at n = 1e5.
    const int n = 100000;
    const auto eta = sample_four_point(n, 1234);
    std::mt19937_64 rng(4321);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> sum(eta.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = eta[i] + unif(rng);
    const Dataset d = residual_only_dataset(sum);
    const CumulantSet k = residual_cumulants(d, constant_predictor(0.0), 4);
    const std::vector<double> expected{0.0, 1.0 + 1.0 / 3.0, -2.4, 5.05 - 2.0 / 15.0};
    const std::vector<double> five_sd{0.03, 0.05, 0.25, 1.4};
    for (int j = 0; j < 4; ++j) CHECK(std::abs(k.values[j] - expected[j]) < five_sd[j]);
  }
  SUBCASE("input validation") {
    Dataset d;
    d.X.resize(0, 1);
    d.t.resize(0);
    d.y.resize(0);
    CHECK_THROWS_AS(residual_cumulants(d, constant_predictor(0.0), 3), std::invalid_argument);
    const Dataset ok = residual_only_dataset({1.0, 2.0});
    CHECK_THROWS_AS(residual_cumulants(ok, constant_predictor(0.0, 4), 3), std::invalid_argument);
  }
}

TEST_CASE("debiased moments") {
  SUBCASE("recursion collapses at zero mean") {
    const std::vector<double> mu{0.0, 1.3, -0.7, 2.2};
    const auto theta = debiased_moments(exact_moments(mu));
    CHECK(theta[0] == 0.0);
    for (int k = 2; k <= 4; ++k) CHECK(theta[k - 1] == mu[k - 1]);
  }
  SUBCASE("hand-applied recursion") {
    const auto theta = debiased_moments(exact_moments({0.1, 1.0, 0.5}));
    CHECK(theta[0] == 0.0);
    CHECK(theta[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(theta[2] == doctest::Approx(0.2).epsilon(1e-14));
  }
  SUBCASE("single order") {
    CHECK(debiased_moments(exact_moments({0.4})) == std::vector<double>{0.0});
  }
  SUBCASE("matches the plug-in cubic at exactly zero mean") {
    // Adjacent +/- pairs cancel exactly under compensated summation.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> sample;
    for (int i = 0; i < 500; ++i) {
      const double v = gauss(rng);
      sample.push_back(v);
      sample.push_back(-v);
    }
    const MomentSequence mu = raw_moments(sample, 3);
    REQUIRE(mu.values[0] == 0.0);
    CHECK(debiased_moments(mu)[2] == cubic_estimators(sample).psi);
  }
}

TEST_CASE("cubic estimators") {
  SUBCASE("symmetric residuals vanish") {
    const CubicEstimators c = cubic_estimators(std::vector<double>{-1.0, 1.0, -1.0, 1.0});
    CHECK(c.psi == 0.0);
    CHECK(c.nu == 0.0);
  }
  SUBCASE("direct arithmetic") {
    const CubicEstimators c = cubic_estimators(std::vector<double>{0.0, 0.0, 3.0});
    CHECK(c.psi == doctest::Approx(0.0).scale(1.0));
    CHECK(c.nu == doctest::Approx(9.0));
  }
  SUBCASE("shift law: psi = k3 - 2 mu1^3 on both the raw and shifted sample") {
    const auto sample = sample_four_point(3000, 8);
    std::vector<double> shifted(sample.size());
    const double c = 0.77;
    for (std::size_t i = 0; i < sample.size(); ++i) shifted[i] = sample[i] + c;

    auto k3_of = [](const std::vector<double>& s) {
      return moments_to_cumulants(raw_moments(s, 3)).values[2];
    };
    auto check_psi = [&](const std::vector<double>& s) {
      const MomentSequence mu = raw_moments(s, 3);
      const double mu1 = mu.values[0];
      CHECK(cubic_estimators(s).psi ==
            doctest::Approx(k3_of(s) - 2.0 * mu1 * mu1 * mu1).epsilon(1e-11));
    };
    check_psi(sample);
    check_psi(shifted);
    // The third cumulant itself is translation invariant.
    CHECK(k3_of(shifted) == doctest::Approx(k3_of(sample)).epsilon(1e-9));
  }
}
