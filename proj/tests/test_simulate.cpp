#include "ace/simulate.hpp"

#include <cmath>

#include "doctest.h"

using namespace ace;
using namespace ace::simulate;

namespace {

DgpConfig small_demand(Eigen::Index n, std::uint64_t seed) {
  DgpConfig cfg;
  cfg.n = n;
  cfg.p = 20;
  cfg.s = 5;
  cfg.seed = seed;
  return cfg;
}

bool reports_equal(const McReport& a, const McReport& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const McRow& x = a.rows[i];
    const McRow& y = b.rows[i];
    if (x.estimator != y.estimator || x.rmse != y.rmse || x.bias != y.bias || x.sd != y.sd ||
        x.coverage != y.coverage || x.mean_ci_width != y.mean_ci_width ||
        x.replicates != y.replicates || x.failures != y.failures) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("noise specs") {
  SUBCASE("demand law moments") {
    const NoiseSpec demand = NoiseSpec::demand_discrete();
    const auto mu = demand.exact_moments(4);
    CHECK(mu[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(mu[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mu[2] == doctest::Approx(-2.4).epsilon(1e-14));
    CHECK(mu[3] == doctest::Approx(8.05).epsilon(1e-14));
  }
  SUBCASE("gaussian and uniform moments") {
    CHECK(NoiseSpec::gaussian(2.0).exact_moments(4)[3] == doctest::Approx(48.0));
    CHECK(NoiseSpec::uniform(3.0).exact_moments(2)[1] == doctest::Approx(3.0));
    CHECK(NoiseSpec::uniform(3.0).exact_moments(3)[2] == 0.0);
  }
  SUBCASE("validation rejects bad laws") {
    CHECK_THROWS_AS(NoiseSpec::custom({1.0, -1.0}, {0.6, 0.6}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSpec::custom({1.0, 2.0}, {0.5, 0.5}).validate(), std::invalid_argument);
    CHECK_NOTHROW(NoiseSpec::custom({1.0, -1.0}, {0.5, 0.5}).validate());
  }
}

TEST_CASE("dataset generation") {
  SUBCASE("deterministic per seed") {
    const DgpConfig cfg = small_demand(200, 42);
    const auto [a, ta] = gen_dataset(cfg);
    const auto [b, tb] = gen_dataset(cfg);
    CHECK(a.X == b.X);
    CHECK(a.t == b.t);
    CHECK(a.y == b.y);
    CHECK(ta.g0.coef == tb.g0.coef);
  }
  SUBCASE("null model has negligible treatment-outcome correlation") {
    DgpConfig cfg = small_demand(20000, 7);
    cfg.s = 0;
    cfg.theta0 = 0.0;
    const auto [d, truth] = gen_dataset(cfg);
    const double n = static_cast<double>(d.n());
    const Eigen::VectorXd tc = d.t.array() - d.t.mean();
    const Eigen::VectorXd yc = d.y.array() - d.y.mean();
    const double corr = tc.dot(yc) / (tc.norm() * yc.norm());
    CHECK(std::abs(corr) < 4.0 / std::sqrt(n));
  }
  SUBCASE("demand noise matches its law") {
    DgpConfig cfg = small_demand(50000, 11);
    cfg.s = 0;  // T is pure noise
    cfg.theta0 = 0.0;
    const auto [d, truth] = gen_dataset(cfg);
    const double n = static_cast<double>(d.n());
    CHECK(std::abs(d.t.mean()) < 4.0 / std::sqrt(n));
    const double var = (d.t.array() - d.t.mean()).square().sum() / n;
    CHECK(std::abs(var - 1.0) < 0.05);
  }
  SUBCASE("xi reuses the covariate and noise draws") {
    DgpConfig base = small_demand(500, 13);
    DgpConfig tilted = base;
    tilted.xi = 0.3;
    const auto [d0, t0] = gen_dataset(base);
    const auto [d1, t1] = gen_dataset(tilted);
    CHECK(d0.X == d1.X);
    for (Eigen::Index i = 0; i < d0.n(); ++i) {
      const double pred = t0.g0.predict(d0.X.row(i));
      const double eta = d0.t[i] - pred;  // xi = 0 exposes eta up to rounding
      CHECK(d1.t[i] ==
            doctest::Approx(pred + (1.0 + 0.3 * d0.X(i, 0)) * eta).epsilon(1e-12).scale(1.0));
    }
  }
  SUBCASE("q0 composes the nuisances") {
    const auto [d, truth] = gen_dataset(small_demand(10, 17));
    const Eigen::VectorXd q = truth.q0.predict_all(d.X);
    const Eigen::VectorXd composed =
        truth.theta0 * truth.g0.predict_all(d.X) + truth.f0.predict_all(d.X);
    for (Eigen::Index i = 0; i < d.n(); ++i) CHECK(q[i] == doctest::Approx(composed[i]));
  }
  SUBCASE("support size is honored") {
    const auto [d, truth] = gen_dataset(small_demand(10, 19));
    CHECK((truth.g0.coef.array() != 0.0).count() == 5);
    CHECK((truth.f0.coef.array() != 0.0).count() == 5);
  }
  SUBCASE("invalid configurations are rejected") {
    DgpConfig cfg = small_demand(100, 1);
    cfg.s = 21;
    CHECK_THROWS_AS(gen_dataset(cfg), std::invalid_argument);
    cfg = small_demand(100, 1);
    cfg.noise = NoiseSpec::custom({1.0, -2.0}, {0.7, 0.3});
    CHECK_THROWS_AS(gen_dataset(cfg), std::invalid_argument);
  }
}

TEST_CASE("estimator specs parse and label") {
  CHECK(EstimatorSpec::parse("dml").kind == EstimatorSpec::Kind::Dml);
  CHECK(EstimatorSpec::parse("ace5").order == 5);
  CHECK(EstimatorSpec::parse("ace5").label() == "ace5");
  CHECK_THROWS_AS(EstimatorSpec::parse("ace9"), std::invalid_argument);
  CHECK_THROWS_AS(EstimatorSpec::parse("ols"), std::invalid_argument);
}

TEST_CASE("monte carlo harness") {
  const std::vector<EstimatorSpec> both{EstimatorSpec::parse("dml"), EstimatorSpec::parse("ace2")};

  McOptions opts;
  opts.reps = 12;
  opts.base_seed = 101;
  opts.policy.kind = NuisancePolicy::Kind::Oracle;
  opts.policy.epsilon1 = 0.1;
  opts.policy.epsilon2 = 0.1;

  SUBCASE("single replicate degenerates cleanly") {
    McOptions one = opts;
    one.reps = 1;
    const McResult res = run_monte_carlo(small_demand(400, 3), both, one);
    for (const McRow& row : res.report.rows) {
      CHECK(row.replicates == 1);
      CHECK(row.sd == 0.0);
      CHECK(row.rmse == doctest::Approx(std::abs(row.bias)));
    }
  }
  SUBCASE("identical seeds give identical reports across thread counts") {
    const McResult a = run_monte_carlo(small_demand(400, 3), both, opts);
    McOptions threaded = opts;
    threaded.threads = 2;
    const McResult b = run_monte_carlo(small_demand(400, 3), both, threaded);
    CHECK(reports_equal(a.report, b.report));
    REQUIRE(a.estimates.size() == b.estimates.size());
    for (std::size_t i = 0; i < a.estimates.size(); ++i) {
      CHECK(a.estimates[i].theta_hat == b.estimates[i].theta_hat);
    }
  }
  SUBCASE("estimator order does not change any estimator's numbers") {
    const std::vector<EstimatorSpec> reversed{both[1], both[0]};
    const McResult a = run_monte_carlo(small_demand(400, 3), both, opts);
    const McResult b = run_monte_carlo(small_demand(400, 3), reversed, opts);
    CHECK(a.report.rows[0].rmse == b.report.rows[1].rmse);
    CHECK(a.report.rows[1].rmse == b.report.rows[0].rmse);
  }
  SUBCASE("rmse decomposes into bias and sd") {
    const McResult res = run_monte_carlo(small_demand(400, 3), both, opts);
    for (const McRow& row : res.report.rows) {
      CHECK(row.rmse * row.rmse ==
            doctest::Approx(row.bias * row.bias + row.sd * row.sd).epsilon(1e-6));
      CHECK(row.coverage >= 0.0);
      CHECK(row.coverage <= 1.0);
    }
  }
  SUBCASE("estimates table carries one row per replicate and estimator") {
    const McResult res = run_monte_carlo(small_demand(400, 3), both, opts);
    CHECK(res.estimates.size() == 24);
    int idx = 0;
    for (int rep = 0; rep < 12; ++rep) {
      for (const auto& spec : both) {
        CHECK(res.estimates[idx].replicate == rep);
        CHECK(res.estimates[idx].estimator == spec.label());
        ++idx;
      }
    }
  }
  SUBCASE("gaussian treatment noise gives higher orders no edge") {
    DgpConfig cfg = small_demand(2000, 5);
    cfg.noise = NoiseSpec::gaussian(1.0);
    McOptions g = opts;
    g.reps = 30;
    const std::vector<EstimatorSpec> specs{EstimatorSpec::parse("dml"),
                                           EstimatorSpec::parse("ace3")};
    const McResult res = run_monte_carlo(cfg, specs, g);
    const McRow& dml = res.report.rows[0];
    const McRow& ace3 = res.report.rows[1];
    const bool no_improvement = ace3.failures > 0 || ace3.rmse > 0.5 * dml.rmse;
    CHECK(no_improvement);
  }
  SUBCASE("lasso policy with the three-way split protocol runs") {
    McOptions lasso_opts;
    lasso_opts.reps = 3;
    lasso_opts.base_seed = 7;
    lasso_opts.policy.kind = NuisancePolicy::Kind::Lasso;
    lasso_opts.protocol = McOptions::Protocol::ThreeWaySplit;
    const McResult res = run_monte_carlo(small_demand(600, 9), both, lasso_opts);
    for (const McRow& row : res.report.rows) CHECK(row.replicates == 3);
  }
}

TEST_CASE("sweeps") {
  const std::vector<EstimatorSpec> ace2{EstimatorSpec::parse("ace2")};
  McOptions opts;
  opts.reps = 6;
  opts.base_seed = 55;
  opts.policy.kind = NuisancePolicy::Kind::Oracle;
  opts.policy.epsilon1 = 0.1;
  opts.policy.epsilon2 = 0.1;

  SUBCASE("single-point grid reduces to a plain run") {
    const DgpConfig base = small_demand(400, 1);
    const auto table = sweep(SweepAxis::Xi, std::vector<double>{0.0}, base, ace2, opts);
    REQUIRE(table.size() == 1);
    const McResult direct = run_monte_carlo(base, ace2, opts);
    CHECK(reports_equal(table[0].second.report, direct.report));
  }
  SUBCASE("n axis changes the sample size") {
    const auto table =
        sweep(SweepAxis::N, std::vector<double>{200.0, 400.0}, small_demand(0, 2), ace2, opts);
    CHECK(table[0].first == 200.0);
    CHECK(table[1].first == 400.0);
  }
  SUBCASE("epsilon axis demands the oracle policy") {
    McOptions lasso_opts = opts;
    lasso_opts.policy.kind = NuisancePolicy::Kind::Lasso;
    CHECK_THROWS_AS(sweep(SweepAxis::Epsilon, std::vector<double>{0.1}, small_demand(200, 2),
                          ace2, lasso_opts),
                    std::invalid_argument);
  }
  SUBCASE("larger oracle errors hurt more at higher epsilon") {
    const auto table = sweep(SweepAxis::Epsilon, std::vector<double>{0.0, 0.5}, small_demand(2000, 3),
                             ace2, opts);
    CHECK(table[0].second.report.rows[0].rmse < table[1].second.report.rows[0].rmse);
  }
  SUBCASE("axis names round-trip") {
    for (const auto axis : {SweepAxis::N, SweepAxis::Xi, SweepAxis::S, SweepAxis::Epsilon}) {
      CHECK(sweep_axis_parse(sweep_axis_name(axis)) == axis);
    }
    CHECK_THROWS_AS(sweep_axis_parse("bogus"), std::invalid_argument);
  }
}

TEST_CASE("coverage smoke at reduced scale") {
  DgpConfig cfg;
  cfg.n = 4000;
  cfg.p = 40;
  cfg.s = 10;
  McOptions opts;
  opts.reps = 60;
  opts.base_seed = 2024;
  opts.threads = 2;
  opts.policy.kind = NuisancePolicy::Kind::Lasso;
  const std::vector<EstimatorSpec> specs{EstimatorSpec::parse("ace2")};
  const McResult res = run_monte_carlo(cfg, specs, opts);
  const McRow& row = res.report.rows[0];
  CHECK(row.failures == 0);
  CHECK(row.coverage > 0.8);
  CHECK(row.coverage <= 1.0);
  CHECK(std::abs(row.bias) < 0.1);
}
