#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ace/cumulants.hpp"
#include "ace/estimators.hpp"
#include "ace/jpoly.hpp"
#include "ace/nuisance.hpp"
#include "ace/partitions.hpp"
#include "ace/simulate.hpp"

namespace py = pybind11;
using namespace ace;

namespace {

cumulants::MomentSequence exact_moments(const std::vector<double>& mu) {
  cumulants::MomentSequence ms;
  ms.origin = cumulants::MomentSequence::Origin::Exact;
  ms.values = mu;
  return ms;
}

Dataset make_dataset(const Eigen::MatrixXd& X, const Eigen::VectorXd& t, const Eigen::VectorXd& y) {
  if (X.rows() != t.size() || X.rows() != y.size()) {
    throw std::invalid_argument("X, t, y must have matching row counts");
  }
  return Dataset{X, t, y};
}

py::dict estimate_to_dict(const estimators::AceEstimate& est) {
  py::dict out;
  out["theta_hat"] = est.theta_hat;
  out["std_error"] = est.std_error;
  out["ci_lo"] = est.ci_lo;
  out["ci_hi"] = est.ci_hi;
  out["level"] = est.level;
  out["denominator"] = est.denominator;
  out["numerator"] = est.numerator;
  out["v_m_hat"] = est.v_m_hat;
  out["cumulants"] = est.cumulants.values;
  out["n_estimation"] = static_cast<long>(est.n_estimation);
  return out;
}

simulate::NoiseSpec noise_from_args(const std::string& kind, double sigma, double half_width,
                                    const std::vector<double>& points,
                                    const std::vector<double>& probs) {
  if (kind == "demand_discrete") return simulate::NoiseSpec::demand_discrete();
  if (kind == "gaussian") return simulate::NoiseSpec::gaussian(sigma);
  if (kind == "uniform") return simulate::NoiseSpec::uniform(half_width);
  if (kind == "custom") return simulate::NoiseSpec::custom(points, probs);
  throw std::invalid_argument("noise kind must be demand_discrete|gaussian|uniform|custom");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cumulant-based higher-order orthogonal treatment-effect estimation";

  // Partition combinatorics.
  m.def("bell_number", [](int n) { return partitions::bell_number(n); }, py::arg("m"));
  m.def(
      "block_size_profiles",
      [](int n) {
        py::list out;
        for (const auto& p : partitions::block_size_profiles(n)) {
          out.append(py::make_tuple(p.sizes, p.multiplicity));
        }
        return out;
      },
      py::arg("m"));
  m.def(
      "partition_weighted_sum",
      [](int m, const std::vector<double>& weights, bool signed_blocks) {
        return partitions::partition_weighted_sum(
            m, weights,
            signed_blocks ? partitions::SignMode::AlternatingBlocks
                          : partitions::SignMode::Unsigned);
      },
      py::arg("m"), py::arg("weights"), py::arg("signed_blocks") = false);

  // Moments and cumulants.
  m.def(
      "raw_moments",
      [](const std::vector<double>& samples, int max_order) {
        return cumulants::raw_moments(samples, max_order).values;
      },
      py::arg("samples"), py::arg("max_order"));
  m.def(
      "moments_to_cumulants",
      [](const std::vector<double>& mu) {
        return cumulants::moments_to_cumulants(exact_moments(mu)).values;
      },
      py::arg("moments"));
  m.def(
      "cumulants_to_moments",
      [](const std::vector<double>& kappa) { return cumulants::cumulants_to_moments(kappa).values; },
      py::arg("cumulants"));
  m.def(
      "debiased_moments",
      [](const std::vector<double>& mu) { return cumulants::debiased_moments(exact_moments(mu)); },
      py::arg("moments"));
  m.def(
      "cubic_estimators",
      [](const std::vector<double>& residuals) {
        const auto c = cumulants::cubic_estimators(residuals);
        return py::make_tuple(c.psi, c.nu);
      },
      py::arg("residuals"));

  // The orthogonalizing polynomial.
  m.def(
      "j_coefficients",
      [](const std::vector<double>& kappa, int r) { return jpoly::j_closed_form(kappa, r).coeffs; },
      py::arg("cumulants"), py::arg("order"));
  m.def(
      "j_recursive_coefficients",
      [](const std::vector<double>& mu, int r) { return jpoly::j_recursive(mu, r).coeffs; },
      py::arg("moments"), py::arg("order"));
  m.def(
      "insensitivity_rhs",
      [](const std::vector<double>& kt, const std::vector<double>& kh, int mth) {
        return jpoly::insensitivity_rhs(kt, kh, mth);
      },
      py::arg("kappa_true"), py::arg("kappa_hat"), py::arg("m"));

  // Nuisance fitting.
  py::class_<nuisance::LinearPredictor>(m, "LinearPredictor")
      .def(py::init([](double intercept, const Eigen::VectorXd& coef) {
             nuisance::LinearPredictor g;
             g.intercept = intercept;
             g.coef = coef;
             return g;
           }),
           py::arg("intercept"), py::arg("coef"))
      .def_readwrite("intercept", &nuisance::LinearPredictor::intercept)
      .def_readwrite("coef", &nuisance::LinearPredictor::coef)
      .def("predict", [](const nuisance::LinearPredictor& g, const Eigen::MatrixXd& X) {
        return g.predict_all(X);
      });
  m.def(
      "lasso_fit",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lam, int max_iters, double tol,
         bool standardize) {
        nuisance::LassoConfig cfg;
        cfg.lambda = lam;
        cfg.max_iters = max_iters;
        cfg.tol = tol;
        cfg.standardize = standardize;
        const auto fit = nuisance::lasso_fit(X, y, cfg);
        return py::make_tuple(fit.predictor, fit.converged, fit.sweeps);
      },
      py::arg("X"), py::arg("y"), py::arg("lambda_"), py::arg("max_iters") = 10000,
      py::arg("tol") = 1e-7, py::arg("standardize") = true);
  m.def(
      "lambda_default",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double c) {
        return nuisance::lambda_default(X, y, c);
      },
      py::arg("X"), py::arg("y"), py::arg("c") = 1.0);

  // Estimators.
  m.def(
      "dml_estimate",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& t, const Eigen::VectorXd& y,
         const nuisance::LinearPredictor& g, const nuisance::LinearPredictor& q) {
        return estimators::dml_estimate(make_dataset(X, t, y), g, q);
      },
      py::arg("X"), py::arg("t"), py::arg("y"), py::arg("g_hat"), py::arg("q_hat"));
  m.def(
      "ace_estimate",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& t, const Eigen::VectorXd& y,
         const nuisance::LinearPredictor& g, const nuisance::LinearPredictor& q, int order,
         std::uint64_t seed, double level, bool sequential_split, bool swap_and_average) {
        estimators::AceConfig cfg;
        cfg.order = order;
        cfg.seed = seed;
        cfg.swap_and_average = swap_and_average;
        cfg.split = sequential_split ? estimators::AceConfig::Split::Sequential
                                     : estimators::AceConfig::Split::Shuffled;
        return estimate_to_dict(
            estimators::ace_estimate(make_dataset(X, t, y), g, q, cfg, level));
      },
      py::arg("X"), py::arg("t"), py::arg("y"), py::arg("g_hat"), py::arg("q_hat"),
      py::arg("order"), py::arg("seed") = 0, py::arg("level") = 0.95,
      py::arg("sequential_split") = false, py::arg("swap_and_average") = false);

  // Data generation and the Monte Carlo harness.
  m.def(
      "gen_dataset",
      [](Eigen::Index n, Eigen::Index p, Eigen::Index s, double theta0, const std::string& noise,
         double xi, double coef_scale, std::uint64_t seed, double sigma, double half_width,
         const std::vector<double>& points, const std::vector<double>& probs) {
        simulate::DgpConfig cfg;
        cfg.n = n;
        cfg.p = p;
        cfg.s = s;
        cfg.theta0 = theta0;
        cfg.noise = noise_from_args(noise, sigma, half_width, points, probs);
        cfg.xi = xi;
        cfg.coef_scale = coef_scale;
        cfg.seed = seed;
        auto [data, truth] = simulate::gen_dataset(cfg);
        py::dict t;
        t["g0"] = truth.g0;
        t["q0"] = truth.q0;
        t["f0"] = truth.f0;
        t["theta0"] = truth.theta0;
        return py::make_tuple(data.X, data.t, data.y, t);
      },
      py::arg("n"), py::arg("p") = 100, py::arg("s") = 40, py::arg("theta0") = 1.0,
      py::arg("noise") = "demand_discrete", py::arg("xi") = 0.0, py::arg("coef_scale") = 1.0,
      py::arg("seed") = 0, py::arg("sigma") = 1.0, py::arg("half_width") = 3.0,
      py::arg("points") = std::vector<double>{}, py::arg("probs") = std::vector<double>{});
  m.def(
      "run_monte_carlo",
      [](Eigen::Index n, const std::vector<std::string>& estimator_labels, int reps,
         Eigen::Index p, Eigen::Index s, double theta0, const std::string& noise, double xi,
         const std::string& policy, double epsilon1, double epsilon2, std::uint64_t seed,
         double level, int threads) {
        simulate::DgpConfig cfg;
        cfg.n = n;
        cfg.p = p;
        cfg.s = s;
        cfg.theta0 = theta0;
        cfg.noise = noise_from_args(noise, 1.0, 3.0, {}, {});
        cfg.xi = xi;
        std::vector<simulate::EstimatorSpec> specs;
        for (const auto& label : estimator_labels) specs.push_back(simulate::EstimatorSpec::parse(label));
        simulate::McOptions opts;
        opts.reps = reps;
        opts.base_seed = seed;
        opts.level = level;
        opts.threads = threads;
        if (policy == "oracle") {
          opts.policy.kind = simulate::NuisancePolicy::Kind::Oracle;
          opts.policy.epsilon1 = epsilon1;
          opts.policy.epsilon2 = epsilon2;
        } else if (policy != "lasso") {
          throw std::invalid_argument("policy must be lasso|oracle");
        }
        const auto result = simulate::run_monte_carlo(cfg, specs, opts);
        py::list rows;
        for (const auto& row : result.report.rows) {
          py::dict r;
          r["estimator"] = row.estimator;
          r["rmse"] = row.rmse;
          r["bias"] = row.bias;
          r["sd"] = row.sd;
          r["coverage"] = row.coverage;
          r["mean_ci_width"] = row.mean_ci_width;
          r["replicates"] = row.replicates;
          r["failures"] = row.failures;
          rows.append(std::move(r));
        }
        return rows;
      },
      py::arg("n"), py::arg("estimators"), py::arg("reps") = 100, py::arg("p") = 100,
      py::arg("s") = 40, py::arg("theta0") = 1.0, py::arg("noise") = "demand_discrete",
      py::arg("xi") = 0.0, py::arg("policy") = "lasso", py::arg("epsilon1") = 0.0,
      py::arg("epsilon2") = 0.0, py::arg("seed") = 0, py::arg("level") = 0.95,
      py::arg("threads") = 1);

  py::register_exception<WeakIdentificationError>(m, "WeakIdentificationError");
  py::register_exception<DegenerateDesignError>(m, "DegenerateDesignError");
  py::register_exception<CapacityError>(m, "CapacityError");
}
