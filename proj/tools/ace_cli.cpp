// ace: treatment-effect estimation in the partially linear model with
// arbitrary-order cumulant-based debiasing, plus the Monte Carlo suites for
// the synthetic demand-estimation benchmark.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ace/common.hpp"
#include "ace/estimators.hpp"
#include "ace/nuisance.hpp"
#include "ace/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ace;

namespace {

// Exit codes: 1 usage, 2 schema, 3 io, 4 data, 5 estimation.
struct CliError : std::runtime_error {
  CliError(std::string category, const std::string& message, int code)
      : std::runtime_error(message), category(std::move(category)), code(code) {}
  std::string category;
  int code;
};

[[noreturn]] void fail(const std::string& category, const std::string& message, int code) {
  throw CliError(category, message, code);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                  const std::set<std::string>& required) {
  if (!obj.is_object()) fail("schema", where + " must be a JSON object", 2);
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) fail("schema", "unknown key '" + key + "' in " + where, 2);
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) fail("schema", "missing key '" + key + "' in " + where, 2);
  }
}

double as_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.at(key).is_number()) fail("schema", "key '" + key + "' in " + where + " must be a number", 2);
  return obj.at(key).get<double>();
}

simulate::NoiseSpec parse_noise(const json& obj) {
  require_keys(obj, "noise", {"kind", "sigma", "half_width", "points", "probs"}, {"kind"});
  const std::string kind = obj.at("kind").get<std::string>();
  if (kind == "demand_discrete") return simulate::NoiseSpec::demand_discrete();
  if (kind == "gaussian") {
    require_keys(obj, "noise", {"kind", "sigma"}, {"kind", "sigma"});
    return simulate::NoiseSpec::gaussian(as_number(obj, "sigma", "noise"));
  }
  if (kind == "uniform") {
    require_keys(obj, "noise", {"kind", "half_width"}, {"kind", "half_width"});
    return simulate::NoiseSpec::uniform(as_number(obj, "half_width", "noise"));
  }
  if (kind == "custom") {
    require_keys(obj, "noise", {"kind", "points", "probs"}, {"kind", "points", "probs"});
    return simulate::NoiseSpec::custom(obj.at("points").get<std::vector<double>>(),
                                       obj.at("probs").get<std::vector<double>>());
  }
  fail("schema", "noise kind '" + kind + "' is not one of demand_discrete|gaussian|uniform|custom", 2);
}

simulate::DgpConfig parse_dgp(const json& obj) {
  require_keys(obj, "dgp", {"n", "p", "s", "theta0", "noise", "xi", "coef_scale"}, {"n", "noise"});
  simulate::DgpConfig cfg;
  cfg.n = static_cast<Eigen::Index>(as_number(obj, "n", "dgp"));
  if (obj.contains("p")) cfg.p = static_cast<Eigen::Index>(as_number(obj, "p", "dgp"));
  if (obj.contains("s")) cfg.s = static_cast<Eigen::Index>(as_number(obj, "s", "dgp"));
  if (obj.contains("theta0")) cfg.theta0 = as_number(obj, "theta0", "dgp");
  if (obj.contains("xi")) cfg.xi = as_number(obj, "xi", "dgp");
  if (obj.contains("coef_scale")) cfg.coef_scale = as_number(obj, "coef_scale", "dgp");
  cfg.noise = parse_noise(obj.at("noise"));
  return cfg;
}

simulate::NuisancePolicy parse_nuisance(const json& obj) {
  simulate::NuisancePolicy policy;
  if (!obj.is_object()) fail("schema", "nuisance must be a JSON object", 2);
  const std::string kind = obj.contains("policy") ? obj.at("policy").get<std::string>() : "lasso";
  if (kind == "lasso") {
    require_keys(obj, "nuisance", {"policy", "lambda", "cv", "lambda_c", "standardize"}, {});
    policy.kind = simulate::NuisancePolicy::Kind::Lasso;
    if (obj.contains("lambda") && !obj.at("lambda").is_null()) {
      policy.lambda = as_number(obj, "lambda", "nuisance");
    }
    if (obj.contains("cv")) policy.cv = obj.at("cv").get<bool>();
    if (obj.contains("lambda_c")) policy.lambda_c = as_number(obj, "lambda_c", "nuisance");
    if (obj.contains("standardize")) policy.lasso.standardize = obj.at("standardize").get<bool>();
    return policy;
  }
  if (kind == "oracle") {
    require_keys(obj, "nuisance", {"policy", "epsilon1", "epsilon2", "mode"},
                 {"epsilon1", "epsilon2"});
    policy.kind = simulate::NuisancePolicy::Kind::Oracle;
    policy.epsilon1 = as_number(obj, "epsilon1", "nuisance");
    policy.epsilon2 = as_number(obj, "epsilon2", "nuisance");
    if (obj.contains("mode")) {
      const std::string mode = obj.at("mode").get<std::string>();
      if (mode == "coefficient-inflation") {
        policy.mode = nuisance::PerturbMode::CoefficientInflation;
      } else if (mode == "additive-function") {
        policy.mode = nuisance::PerturbMode::AdditiveFunction;
      } else {
        fail("schema", "nuisance mode '" + mode + "' is not coefficient-inflation|additive-function", 2);
      }
    }
    return policy;
  }
  fail("schema", "nuisance policy '" + kind + "' is not one of lasso|oracle", 2);
}

struct Scenario {
  simulate::DgpConfig dgp;
  std::vector<simulate::EstimatorSpec> estimators;
  simulate::McOptions options;
  std::optional<std::string> out_dir;
  json echo;  // the parsed document, for report.json
};

Scenario parse_scenario(const json& doc) {
  require_keys(doc, "scenario",
               {"dgp", "estimators", "reps", "nuisance", "seed", "level", "protocol", "threads",
                "out_dir"},
               {"dgp", "estimators", "reps"});
  Scenario sc;
  sc.dgp = parse_dgp(doc.at("dgp"));
  if (!doc.at("estimators").is_array() || doc.at("estimators").empty()) {
    fail("schema", "key 'estimators' must be a nonempty array", 2);
  }
  for (const auto& entry : doc.at("estimators")) {
    try {
      sc.estimators.push_back(simulate::EstimatorSpec::parse(entry.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      fail("schema", e.what(), 2);
    }
  }
  sc.options.reps = static_cast<int>(as_number(doc, "reps", "scenario"));
  if (sc.options.reps < 1) fail("schema", "key 'reps' must be >= 1", 2);
  if (doc.contains("nuisance")) sc.options.policy = parse_nuisance(doc.at("nuisance"));
  if (doc.contains("seed")) {
    sc.options.base_seed = static_cast<std::uint64_t>(as_number(doc, "seed", "scenario"));
    sc.dgp.seed = sc.options.base_seed;
  }
  if (doc.contains("level")) sc.options.level = as_number(doc, "level", "scenario");
  if (!(sc.options.level > 0.0 && sc.options.level < 1.0)) {
    fail("schema", "key 'level' must lie in (0, 1)", 2);
  }
  if (doc.contains("protocol")) {
    const std::string protocol = doc.at("protocol").get<std::string>();
    if (protocol == "auxiliary_sample") {
      sc.options.protocol = simulate::McOptions::Protocol::AuxiliarySample;
    } else if (protocol == "three_way_split") {
      sc.options.protocol = simulate::McOptions::Protocol::ThreeWaySplit;
    } else {
      fail("schema", "protocol '" + protocol + "' is not auxiliary_sample|three_way_split", 2);
    }
  }
  if (doc.contains("threads")) sc.options.threads = static_cast<int>(as_number(doc, "threads", "scenario"));
  if (doc.contains("out_dir")) sc.out_dir = doc.at("out_dir").get<std::string>();
  sc.echo = doc;
  return sc;
}

json row_to_json(const simulate::McRow& row) {
  return json{{"estimator", row.estimator},
              {"rmse", row.rmse},
              {"bias", row.bias},
              {"sd", row.sd},
              {"coverage", row.coverage},
              {"mean_ci_width", row.mean_ci_width},
              {"replicates", row.replicates},
              {"failures", row.failures},
              {"high_failure_rate", row.high_failure_rate}};
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("io", "cannot open '" + path.string() + "' for writing", 3);
  out << contents;
  if (!out) fail("io", "failed writing '" + path.string() + "'", 3);
}

std::string report_csv(const simulate::McReport& report, const std::string& axis_name = "",
                       double axis_value = 0.0) {
  std::string out;
  for (const auto& row : report.rows) {
    if (!axis_name.empty()) out += fmt(axis_value) + ",";
    out += row.estimator + "," + fmt(row.rmse) + "," + fmt(row.bias) + "," + fmt(row.sd) + "," +
           fmt(row.coverage) + "," + fmt(row.mean_ci_width) + "," + std::to_string(row.replicates) +
           "," + std::to_string(row.failures) + "\n";
  }
  return out;
}

std::string report_csv_header(const std::string& axis_name = "") {
  std::string head = "estimator,rmse,bias,sd,coverage,mean_ci_width,replicates,failures\n";
  if (!axis_name.empty()) head = axis_name + "," + head;
  return head;
}

std::string estimates_csv_header(const std::string& axis_name = "") {
  std::string head = "replicate,estimator,theta_hat,std_error,ci_lo,ci_hi,covered\n";
  if (!axis_name.empty()) head = axis_name + "," + head;
  return head;
}

std::string estimates_csv(const std::vector<simulate::ReplicateRow>& rows,
                          const std::string& axis_name = "", double axis_value = 0.0) {
  std::string out;
  for (const auto& row : rows) {
    if (!axis_name.empty()) out += fmt(axis_value) + ",";
    out += std::to_string(row.replicate) + "," + row.estimator + "," + fmt(row.theta_hat) + "," +
           fmt(row.std_error) + "," + fmt(row.ci_lo) + "," + fmt(row.ci_hi) + "," +
           (row.covered ? "1" : "0") + "\n";
  }
  return out;
}

int cmd_simulate(const std::string& scenario_path, std::string out_dir, int threads_flag) {
  std::ifstream in(scenario_path);
  if (!in) fail("io", "cannot read scenario file '" + scenario_path + "'", 3);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    fail("schema", std::string("scenario is not valid JSON: ") + e.what(), 2);
  }
  Scenario sc = parse_scenario(doc);
  if (out_dir.empty() && sc.out_dir) out_dir = *sc.out_dir;
  if (out_dir.empty()) fail("usage", "no output directory: pass --out or set out_dir", 1);
  if (threads_flag != 0) sc.options.threads = threads_flag;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail("io", "cannot create output directory '" + out_dir + "'", 3);

  const simulate::McResult result = simulate::run_monte_carlo(sc.dgp, sc.estimators, sc.options);

  write_file(fs::path(out_dir) / "report.csv", report_csv_header() + report_csv(result.report));
  write_file(fs::path(out_dir) / "estimates.csv",
             estimates_csv_header() + estimates_csv(result.estimates));
  json report_doc{{"theta0", result.report.theta0},
                  {"reps_requested", result.report.reps_requested},
                  {"level", sc.options.level},
                  {"scenario", sc.echo},
                  {"rows", json::array()}};
  for (const auto& row : result.report.rows) report_doc["rows"].push_back(row_to_json(row));
  write_file(fs::path(out_dir) / "report.json", report_doc.dump(2) + "\n");

  for (const auto& row : result.report.rows) {
    std::cout << row.estimator << ": rmse=" << fmt(row.rmse) << " bias=" << fmt(row.bias)
              << " sd=" << fmt(row.sd) << " coverage=" << fmt(row.coverage)
              << " failures=" << row.failures << "\n";
  }
  return 0;
}

Dataset read_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io", "cannot read data file '" + path + "'", 3);
  std::string line;
  if (!std::getline(in, line)) fail("data", "empty data file", 4);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header[header.size() - 2] != "t" || header.back() != "y") {
    fail("data", "header must be x1..xp,t,y", 4);
  }
  const std::size_t p = header.size() - 2;
  for (std::size_t j = 0; j < p; ++j) {
    if (header[j] != "x" + std::to_string(j + 1)) fail("data", "header must be x1..xp,t,y", 4);
  }

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(p + 2);
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
        row.push_back(v);
      } catch (const std::exception&) {
        fail("data", "non-numeric cell '" + cell + "' at line " + std::to_string(line_no), 4);
      }
    }
    if (row.size() != p + 2) {
      fail("data", "expected " + std::to_string(p + 2) + " cells at line " + std::to_string(line_no),
           4);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 4) fail("data", "need at least 4 data rows", 4);

  Dataset d;
  const auto n = static_cast<Eigen::Index>(rows.size());
  d.X.resize(n, static_cast<Eigen::Index>(p));
  d.t.resize(n);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) d.X(i, static_cast<Eigen::Index>(j)) = rows[i][j];
    d.t[i] = rows[i][p];
    d.y[i] = rows[i][p + 1];
  }
  return d;
}

int cmd_estimate(const std::string& data_path, int order, double level, std::uint64_t seed,
                 double lambda_flag, bool use_cv) {
  if (order < 1 || order > 8) fail("usage", "--order must be in [1, 8]", 1);
  if (!(level > 0.0 && level < 1.0)) fail("usage", "--level must lie in (0, 1)", 1);
  const Dataset data = read_csv_dataset(data_path);

  // Disjoint folds: the first (shuffled) half trains the nuisances, the
  // second is handed to the estimator, which splits it again internally.
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(data.n()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  std::mt19937_64 rng(derive_seed(seed, 0xC11));
  std::shuffle(rows.begin(), rows.end(), rng);
  const auto n_train = static_cast<std::size_t>(data.n()) / 2;

  auto gather = [&](std::size_t begin, std::size_t end) {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(end - begin), data.dim());
    out.t.resize(static_cast<Eigen::Index>(end - begin));
    out.y.resize(static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) {
      out.X.row(static_cast<Eigen::Index>(i - begin)) = data.X.row(rows[i]);
      out.t[static_cast<Eigen::Index>(i - begin)] = data.t[rows[i]];
      out.y[static_cast<Eigen::Index>(i - begin)] = data.y[rows[i]];
    }
    return out;
  };
  const Dataset train = gather(0, n_train);
  const Dataset estimation = gather(n_train, static_cast<std::size_t>(data.n()));

  auto pick_lambda = [&](const Eigen::VectorXd& target) {
    if (use_cv) return nuisance::lasso_cv_lambda(train.X, target, nuisance::LassoConfig{});
    if (lambda_flag >= 0.0) return lambda_flag;
    return nuisance::lambda_default(train.X, target);
  };
  nuisance::LassoConfig cfg_g;
  cfg_g.lambda = pick_lambda(train.t);
  nuisance::LassoConfig cfg_q;
  cfg_q.lambda = pick_lambda(train.y);
  const auto g_hat = nuisance::lasso_fit(train.X, train.t, cfg_g).predictor;
  const auto q_hat = nuisance::lasso_fit(train.X, train.y, cfg_q).predictor;

  estimators::AceConfig cfg;
  cfg.order = order;
  cfg.seed = derive_seed(seed, 0xACE);
  estimators::AceEstimate est;
  try {
    est = estimators::ace_estimate(estimation, g_hat, q_hat, cfg, level);
  } catch (const WeakIdentificationError& e) {
    fail("estimation",
         std::string("weak identification: ") + e.what() +
             " (denominator=" + fmt(e.denominator) + ")",
         5);
  } catch (const DegenerateDesignError& e) {
    fail("estimation", e.what(), 5);
  } catch (const std::invalid_argument& e) {
    fail("data", e.what(), 4);
  }

  json out{{"theta_hat", est.theta_hat},
           {"std_error", est.std_error},
           {"ci_lo", est.ci_lo},
           {"ci_hi", est.ci_hi},
           {"level", est.level},
           {"order", order},
           {"n", data.n()},
           {"p", data.dim()},
           {"n_nuisance", train.n()},
           {"n_estimation", est.n_estimation},
           {"denominator", est.denominator},
           {"v_m_hat", est.v_m_hat},
           {"lambda_g", cfg_g.lambda},
           {"lambda_q", cfg_q.lambda},
           {"cumulants", est.cumulants.values}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

struct SuiteConfig {
  simulate::DgpConfig dgp;
  simulate::SweepAxis axis;
  std::vector<double> grid;
  std::vector<simulate::EstimatorSpec> estimators;
  int reps = 0;
};

SuiteConfig suite_config(const std::string& suite, const std::string& scale) {
  auto specs = [](std::initializer_list<const char*> labels) {
    std::vector<simulate::EstimatorSpec> out;
    for (const char* l : labels) out.push_back(simulate::EstimatorSpec::parse(l));
    return out;
  };
  SuiteConfig sc;
  sc.dgp.theta0 = 1.0;
  sc.dgp.noise = simulate::NoiseSpec::demand_discrete();
  if (suite == "fig1") {
    sc.axis = simulate::SweepAxis::N;
    sc.dgp.p = 100;
    sc.dgp.s = 40;
    sc.estimators = specs({"ace1", "ace2", "ace3", "ace5"});
    if (scale == "full") {
      sc.grid = {2000, 5000, 10000, 20000};
      sc.reps = 20000;
    } else if (scale == "desk") {
      sc.grid = {2000, 5000, 10000, 20000};
      sc.reps = 500;
    } else {
      sc.grid = {1500, 3000};
      sc.reps = 8;
    }
    return sc;
  }
  if (suite == "correlation") {
    sc.axis = simulate::SweepAxis::Xi;
    sc.dgp.p = 100;
    sc.dgp.s = 40;
    sc.dgp.n = 20000;
    sc.estimators = specs({"ace1", "ace2", "ace5"});
    if (scale == "full") {
      sc.grid = {0.0, 0.05, 0.1, 0.2, 0.3};
      sc.reps = 20000;
    } else if (scale == "desk") {
      sc.grid = {0.0, 0.05, 0.1, 0.2, 0.3};
      sc.reps = 200;
    } else {
      sc.grid = {0.0, 0.2};
      sc.dgp.n = 1500;
      sc.reps = 8;
    }
    return sc;
  }
  if (suite == "sparsity") {
    sc.axis = simulate::SweepAxis::S;
    sc.dgp.n = 10000;
    sc.estimators = specs({"ace1", "ace2", "ace5"});
    if (scale == "full") {
      sc.dgp.p = 1000;
      sc.grid = {40, 100, 200};
      sc.reps = 20000;
    } else if (scale == "desk") {
      sc.dgp.p = 400;
      sc.grid = {40, 100, 200};
      sc.reps = 100;
    } else {
      sc.dgp.p = 60;
      sc.dgp.n = 1500;
      sc.grid = {10, 50};
      sc.reps = 8;
    }
    return sc;
  }
  fail("usage", "suite '" + suite + "' is not one of fig1|correlation|sparsity", 1);
}

int cmd_papersuite(const std::string& suite, const std::string& scale, const std::string& out_dir,
                   int threads_flag) {
  const SuiteConfig sc = suite_config(suite, scale);
  simulate::McOptions options;
  options.reps = sc.reps;
  options.base_seed = 20250517;
  options.policy.kind = simulate::NuisancePolicy::Kind::Lasso;
  options.threads = threads_flag;

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail("io", "cannot create output directory '" + out_dir + "'", 3);

  const std::string axis = simulate::sweep_axis_name(sc.axis);
  const auto table = simulate::sweep(sc.axis, sc.grid, sc.dgp, sc.estimators, options);

  std::string report = report_csv_header(axis);
  std::string estimates = estimates_csv_header(axis);
  json report_doc{{"suite", suite}, {"scale", scale},    {"axis", axis},
                  {"seed", options.base_seed},           {"reps", sc.reps},
                  {"theta0", sc.dgp.theta0},             {"rows", json::array()}};
  for (const auto& [value, result] : table) {
    report += report_csv(result.report, axis, value);
    estimates += estimates_csv(result.estimates, axis, value);
    for (const auto& row : result.report.rows) {
      json j = row_to_json(row);
      j[axis] = value;
      report_doc["rows"].push_back(std::move(j));
    }
  }
  write_file(fs::path(out_dir) / (suite + "_report.csv"), report);
  write_file(fs::path(out_dir) / (suite + "_estimates.csv"), estimates);
  write_file(fs::path(out_dir) / (suite + "_report.json"), report_doc.dump(2) + "\n");

  std::cout << "wrote " << (fs::path(out_dir) / (suite + "_report.csv")).string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order orthogonal treatment-effect estimation in the partially linear model"};
  app.require_subcommand(1);

  int threads = 0;
  if (const char* env = std::getenv("ACE_THREADS")) threads = std::atoi(env);
  app.add_option("--threads", threads, "Worker threads for Monte Carlo replicates (0 = auto)");

  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo scenario from a JSON file");
  std::string scenario_path;
  std::string out_dir;
  sim->add_option("scenario", scenario_path, "Scenario JSON path")->required();
  sim->add_option("--out", out_dir, "Output directory");

  auto* est = app.add_subcommand("estimate", "Estimate the treatment effect from a CSV file");
  std::string data_path;
  int order = 1;
  double level = 0.95;
  std::uint64_t seed = 0;
  double lambda_flag = -1.0;
  bool use_cv = false;
  est->add_option("--data", data_path, "CSV with header x1..xp,t,y")->required();
  est->add_option("--order", order, "Orthogonalization order r (1..8)")->required();
  est->add_option("--level", level, "Confidence level")->capture_default_str();
  est->add_option("--seed", seed, "Seed for the fold split")->capture_default_str();
  auto* lam = est->add_option("--lambda", lambda_flag, "Fixed lasso penalty");
  est->add_flag("--cv", use_cv, "Cross-validate the lasso penalty")->excludes(lam);

  auto* paper = app.add_subcommand("papersuite", "Run a preconfigured experiment suite");
  std::string suite;
  std::string scale = "desk";
  std::string suite_out;
  paper->add_option("--suite", suite, "fig1|correlation|sparsity")->required();
  paper->add_option("--scale", scale, "desk|full|smoke")->capture_default_str();
  paper->add_option("--out", suite_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
    if (sim->parsed()) return cmd_simulate(scenario_path, out_dir, threads);
    if (est->parsed()) return cmd_estimate(data_path, order, level, seed, lambda_flag, use_cv);
    if (paper->parsed()) {
      if (scale != "desk" && scale != "full" && scale != "smoke") {
        fail("usage", "scale '" + scale + "' is not one of desk|full|smoke", 1);
      }
      return cmd_papersuite(suite, scale, suite_out, threads);
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: usage: " << e.what() << "\n";
    return 1;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.category << ": " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 10;
  }
  return 0;
}
