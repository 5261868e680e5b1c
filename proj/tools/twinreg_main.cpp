// twinreg: sparse regression with two-mountain penalties.
//
// Subcommands: fit, path, cv, calibrate, bench, dataset, replay. Every run
// writes a manifest with its fully resolved configuration; `replay` re-runs
// a manifest and reproduces the outputs byte for byte.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "twinreg/csv.hpp"
#include "twinreg/metrics.hpp"
#include "twinreg/penalty.hpp"
#include "twinreg/simulate.hpp"
#include "twinreg/solver.hpp"
#include "twinreg/stats.hpp"
#include "twinreg/tuning.hpp"
#include "twinreg/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace twinreg;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitSolverFailure = 3;

// ---------------------------------------------------------------------------
// option groups shared between subcommands

struct PenaltyOptions {
  std::string penalty = "twin-a";
  double tau = 0.1;
  double h = 0.5;
  double mcp_shape = 1.4;
  double scad_shape = 3.7;
};

struct SolverOptions {
  std::string algorithm = "cd";
  int max_sweeps = 1000;
  double tol = 1e-7;
  std::string order = "random";
  std::uint64_t seed = 1;
  int lla_iters = 3;
  double kkt_tol = 1e-4;
};

PenaltySpec build_spec(const PenaltyOptions& po, double lambda) {
  if (po.penalty == "twin-a") return twin_a(lambda, po.tau);
  if (po.penalty == "twin-b") return twin_b(lambda, po.tau, po.h);
  if (po.penalty == "lasso") return lasso(lambda);
  if (po.penalty == "mcp") return mcp(lambda, po.mcp_shape);
  if (po.penalty == "scad") return scad(lambda, po.scad_shape);
  throw std::runtime_error("unknown penalty '" + po.penalty + "'");
}

Algorithm build_algorithm(const std::string& name) {
  if (name == "cd") return Algorithm::CD;
  if (name == "mclla") return Algorithm::MCLLA;
  throw std::runtime_error("unknown algorithm '" + name + "'");
}

SolverConfig build_solver(const SolverOptions& so) {
  SolverConfig cfg;
  cfg.max_sweeps = so.max_sweeps;
  cfg.tol = so.tol;
  if (so.order == "random") {
    cfg.coordinate_order = CoordinateOrder::RandomPermutation;
  } else if (so.order == "cyclic") {
    cfg.coordinate_order = CoordinateOrder::Cyclic;
  } else {
    throw std::runtime_error("unknown coordinate order '" + so.order + "'");
  }
  cfg.rng_seed = so.seed;
  cfg.lla_outer_iters = so.lla_iters;
  cfg.kkt_tol = so.kkt_tol;
  return cfg;
}

void to_json(json& j, const PenaltyOptions& po) {
  j = json{{"penalty", po.penalty},
           {"tau", po.tau},
           {"h", po.h},
           {"mcp_shape", po.mcp_shape},
           {"scad_shape", po.scad_shape}};
}
void from_json(const json& j, PenaltyOptions& po) {
  j.at("penalty").get_to(po.penalty);
  j.at("tau").get_to(po.tau);
  j.at("h").get_to(po.h);
  j.at("mcp_shape").get_to(po.mcp_shape);
  j.at("scad_shape").get_to(po.scad_shape);
}

void to_json(json& j, const SolverOptions& so) {
  j = json{{"algorithm", so.algorithm}, {"max_sweeps", so.max_sweeps},
           {"tol", so.tol},             {"order", so.order},
           {"seed", so.seed},           {"lla_iters", so.lla_iters},
           {"kkt_tol", so.kkt_tol}};
}
void from_json(const json& j, SolverOptions& so) {
  j.at("algorithm").get_to(so.algorithm);
  j.at("max_sweeps").get_to(so.max_sweeps);
  j.at("tol").get_to(so.tol);
  j.at("order").get_to(so.order);
  j.at("seed").get_to(so.seed);
  j.at("lla_iters").get_to(so.lla_iters);
  j.at("kkt_tol").get_to(so.kkt_tol);
}

// ---------------------------------------------------------------------------
// scenario files: flat key = value

std::string scheme_name(CoefScheme s) {
  return s == CoefScheme::UniformMagnitude ? "uniform" : "geometric";
}
std::string design_name(DesignKind d) {
  switch (d) {
    case DesignKind::AR1: return "ar1";
    case DesignKind::IIDGaussian: return "iid";
    case DesignKind::Orthonormal: return "orthonormal";
  }
  return "?";
}

struct ScenarioFile {
  SimScenario scenario;
  int test_size = 5000;
};

ScenarioFile parse_scenario_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open scenario file '" + path + "'");
  ScenarioFile out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    auto num = [&] { return parse_double(val); };
    if (key == "n") out.scenario.n = static_cast<int>(num());
    else if (key == "p") out.scenario.p = static_cast<int>(num());
    else if (key == "rho") out.scenario.rho = num();
    else if (key == "k") out.scenario.k = static_cast<int>(num());
    else if (key == "decay_c") out.scenario.decay_c = num();
    else if (key == "snr") out.scenario.snr = num();
    else if (key == "seed") out.scenario.seed = static_cast<std::uint64_t>(num());
    else if (key == "test_size") out.test_size = static_cast<int>(num());
    else if (key == "scheme") {
      if (val == "uniform") out.scenario.scheme = CoefScheme::UniformMagnitude;
      else if (val == "geometric") out.scenario.scheme = CoefScheme::GeometricDecay;
      else throw std::runtime_error(path + ": unknown scheme '" + val + "'");
    } else if (key == "design") {
      if (val == "ar1") out.scenario.design_kind = DesignKind::AR1;
      else if (val == "iid") out.scenario.design_kind = DesignKind::IIDGaussian;
      else if (val == "orthonormal") out.scenario.design_kind = DesignKind::Orthonormal;
      else throw std::runtime_error(path + ": unknown design '" + val + "'");
    } else {
      throw std::runtime_error(path + ": unknown key '" + key + "'");
    }
  }
  validate_scenario(out.scenario);
  return out;
}

} // namespace

// json conversions must live in the type's namespace for lookup
namespace twinreg {

void to_json(json& j, const SimScenario& sc) {
  j = json{{"n", sc.n},
           {"p", sc.p},
           {"rho", sc.rho},
           {"k", sc.k},
           {"scheme", scheme_name(sc.scheme)},
           {"decay_c", sc.decay_c},
           {"snr", sc.snr},
           {"seed", sc.seed},
           {"design", design_name(sc.design_kind)}};
}
void from_json(const json& j, SimScenario& sc) {
  j.at("n").get_to(sc.n);
  j.at("p").get_to(sc.p);
  j.at("rho").get_to(sc.rho);
  j.at("k").get_to(sc.k);
  const std::string scheme = j.at("scheme");
  sc.scheme = scheme == "uniform" ? CoefScheme::UniformMagnitude
                                  : CoefScheme::GeometricDecay;
  j.at("decay_c").get_to(sc.decay_c);
  j.at("snr").get_to(sc.snr);
  j.at("seed").get_to(sc.seed);
  const std::string design = j.at("design");
  sc.design_kind = design == "ar1"   ? DesignKind::AR1
                   : design == "iid" ? DesignKind::IIDGaussian
                                     : DesignKind::Orthonormal;
}

} // namespace twinreg

namespace {

// ---------------------------------------------------------------------------
// manifest plumbing

void write_file(const std::string& path, const std::string& content) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  os << content;
}

void write_manifest(const std::string& prefix, const std::string& command,
                    const json& config, const json& outputs) {
  json j;
  j["tool"] = "twinreg";
  j["version"] = TWINREG_VERSION;
  j["command"] = command;
  j["config"] = config;
  j["outputs"] = outputs;
  write_file(prefix + ".manifest.json", j.dump(2) + "\n");
}

std::string redirect_prefix(const std::string& prefix, const std::string& out_dir) {
  if (out_dir.empty()) return prefix;
  return (fs::path(out_dir) / fs::path(prefix).filename()).string();
}

// ---------------------------------------------------------------------------
// shared data loading

struct LoadedData {
  Problem raw;
  std::vector<std::string> names; // predictor names
  std::string response_name;
};

LoadedData load_regression_csv(const std::string& path) {
  const NumericCsv csv = read_numeric_csv_file(path);
  if (csv.header.size() < 2) {
    throw std::runtime_error(path + ": need a response column plus predictors");
  }
  LoadedData out;
  out.response_name = csv.header.front();
  out.names.assign(csv.header.begin() + 1, csv.header.end());
  const Eigen::VectorXd y = csv.values.col(0);
  const Eigen::MatrixXd X = csv.values.rightCols(csv.values.cols() - 1);
  out.raw = make_problem(y, X);
  return out;
}

void write_coefficients_csv(const std::string& path,
                            const std::vector<std::string>& names,
                            const Eigen::VectorXd& beta, double intercept) {
  std::ostringstream os;
  os << "variable,coefficient\n";
  os << "(intercept)," << format_double(intercept) << '\n';
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    os << csv_quote(names[j]) << ',' << format_double(beta[j]) << '\n';
  }
  write_file(path, os.str());
}

// ---------------------------------------------------------------------------
// fit

struct FitCmd {
  std::string input;
  std::string output_prefix;
  double lambda = 0.0;
  bool no_center = false;
  PenaltyOptions pen;
  SolverOptions solver;
};

void to_json(json& j, const FitCmd& c) {
  j = json{{"input", c.input},         {"output_prefix", c.output_prefix},
           {"lambda", c.lambda},       {"no_center", c.no_center},
           {"penalty_options", c.pen}, {"solver_options", c.solver}};
}
void from_json(const json& j, FitCmd& c) {
  j.at("input").get_to(c.input);
  j.at("output_prefix").get_to(c.output_prefix);
  j.at("lambda").get_to(c.lambda);
  j.at("no_center").get_to(c.no_center);
  j.at("penalty_options").get_to(c.pen);
  j.at("solver_options").get_to(c.solver);
}

int run_fit(const FitCmd& cmd) {
  const LoadedData data = load_regression_csv(cmd.input);
  Problem pr = data.raw;
  double y_mean = 0.0;
  if (!cmd.no_center) {
    y_mean = pr.y.mean();
    pr.y.array() -= y_mean;
  }
  const Problem std_pr = standardize(pr);
  const PenaltySpec spec = build_spec(cmd.pen, cmd.lambda);
  const SolverConfig cfg = build_solver(cmd.solver);
  const FitResult fr =
      fit(std_pr, spec, cfg, build_algorithm(cmd.solver.algorithm), nullptr);
  const Eigen::VectorXd beta = to_original_scale(std_pr, fr.beta);

  write_coefficients_csv(cmd.output_prefix + ".coefficients.csv", data.names, beta,
                         y_mean);
  json summary;
  summary["penalty"] = penalty_name(spec);
  summary["lambda"] = cmd.lambda;
  if (is_twin(spec)) summary["tau"] = cmd.pen.tau;
  summary["n"] = std_pr.n();
  summary["p"] = std_pr.p();
  summary["objective"] = fr.objective;
  summary["sweeps_used"] = fr.sweeps_used;
  summary["converged"] = fr.converged;
  summary["kkt_max_violation"] = fr.kkt_max_violation;
  json active = json::array();
  for (int j : fr.active_set) active.push_back(data.names[j]);
  summary["active_set"] = active;
  write_file(cmd.output_prefix + ".summary.json", summary.dump(2) + "\n");

  write_manifest(cmd.output_prefix, "fit", json(cmd),
                 json{{"coefficients", cmd.output_prefix + ".coefficients.csv"},
                      {"summary", cmd.output_prefix + ".summary.json"}});
  return 0;
}

// ---------------------------------------------------------------------------
// path

struct PathCmd {
  std::string input;
  std::string output_prefix;
  int n_lambda = 100;
  double lambda_min_ratio = -1.0;
  bool no_center = false;
  PenaltyOptions pen;
  SolverOptions solver;
};

void to_json(json& j, const PathCmd& c) {
  j = json{{"input", c.input},
           {"output_prefix", c.output_prefix},
           {"n_lambda", c.n_lambda},
           {"lambda_min_ratio", c.lambda_min_ratio},
           {"no_center", c.no_center},
           {"penalty_options", c.pen},
           {"solver_options", c.solver}};
}
void from_json(const json& j, PathCmd& c) {
  j.at("input").get_to(c.input);
  j.at("output_prefix").get_to(c.output_prefix);
  j.at("n_lambda").get_to(c.n_lambda);
  j.at("lambda_min_ratio").get_to(c.lambda_min_ratio);
  j.at("no_center").get_to(c.no_center);
  j.at("penalty_options").get_to(c.pen);
  j.at("solver_options").get_to(c.solver);
}

int run_path(const PathCmd& cmd) {
  const LoadedData data = load_regression_csv(cmd.input);
  Problem pr = data.raw;
  if (!cmd.no_center) pr.y.array() -= pr.y.mean();
  const Problem std_pr = standardize(pr);
  const PenaltySpec spec = build_spec(cmd.pen, 1.0);
  const PathResult path =
      fit_path(std_pr, spec, cmd.n_lambda, cmd.lambda_min_ratio,
               build_solver(cmd.solver), build_algorithm(cmd.solver.algorithm));

  std::ostringstream os;
  os << "lambda,variable,coefficient\n";
  for (std::size_t i = 0; i < path.lambdas.size(); ++i) {
    const Eigen::VectorXd beta = to_original_scale(std_pr, path.fits[i].beta);
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      os << format_double(path.lambdas[i]) << ',' << csv_quote(data.names[j]) << ','
         << format_double(beta[j]) << '\n';
    }
  }
  write_file(cmd.output_prefix + ".path.csv", os.str());
  write_manifest(cmd.output_prefix, "path", json(cmd),
                 json{{"path", cmd.output_prefix + ".path.csv"}});
  return 0;
}

// ---------------------------------------------------------------------------
// cv

struct CvCmd {
  std::string input;
  std::string output_prefix;
  int folds = 10;
  int n_lambda = 100;
  double lambda_min_ratio = -1.0;
  bool no_center = false;
  PenaltyOptions pen;
  SolverOptions solver;
};

void to_json(json& j, const CvCmd& c) {
  j = json{{"input", c.input},
           {"output_prefix", c.output_prefix},
           {"folds", c.folds},
           {"n_lambda", c.n_lambda},
           {"lambda_min_ratio", c.lambda_min_ratio},
           {"no_center", c.no_center},
           {"penalty_options", c.pen},
           {"solver_options", c.solver}};
}
void from_json(const json& j, CvCmd& c) {
  j.at("input").get_to(c.input);
  j.at("output_prefix").get_to(c.output_prefix);
  j.at("folds").get_to(c.folds);
  j.at("n_lambda").get_to(c.n_lambda);
  j.at("lambda_min_ratio").get_to(c.lambda_min_ratio);
  j.at("no_center").get_to(c.no_center);
  j.at("penalty_options").get_to(c.pen);
  j.at("solver_options").get_to(c.solver);
}

int run_cv(const CvCmd& cmd) {
  const LoadedData data = load_regression_csv(cmd.input);
  const SolverConfig cfg = build_solver(cmd.solver);
  const Algorithm alg = build_algorithm(cmd.solver.algorithm);
  const PenaltySpec spec = build_spec(cmd.pen, 1.0);
  const CvResult cv =
      cross_validate(data.raw, spec, cmd.folds, cfg, alg, cmd.n_lambda,
                     cmd.lambda_min_ratio, cmd.solver.seed, !cmd.no_center);
  for (const auto& w : cv.warnings) std::cerr << "warning: " << w << '\n';

  std::ostringstream os;
  os << "lambda,cv_mse\n";
  for (std::size_t i = 0; i < cv.lambdas.size(); ++i) {
    os << format_double(cv.lambdas[i]) << ',' << format_double(cv.cv_curve[i]) << '\n';
  }
  write_file(cmd.output_prefix + ".cv.csv", os.str());

  // refit on the full data by walking the path down to the selected lambda;
  // jumping there cold can land in a different local minimum
  Problem pr = data.raw;
  double y_mean = 0.0;
  if (!cmd.no_center) {
    y_mean = pr.y.mean();
    pr.y.array() -= y_mean;
  }
  const Problem std_pr = standardize(pr);
  const std::vector<double> head(cv.lambdas.begin(),
                                 cv.lambdas.begin() + cv.best_index + 1);
  const PathResult path = fit_path(std_pr, spec, head, cfg, alg);
  const FitResult& best = path.fits.back();
  write_coefficients_csv(cmd.output_prefix + ".coefficients.csv", data.names,
                         to_original_scale(std_pr, best.beta), y_mean);

  json summary;
  summary["penalty"] = penalty_name(spec);
  summary["folds"] = cmd.folds;
  summary["best_lambda"] = cv.best_lambda;
  summary["best_index"] = cv.best_index;
  summary["cv_mse_at_best"] = cv.cv_curve[cv.best_index];
  summary["active_set_size"] = best.active_set.size();
  summary["warnings"] = cv.warnings;
  write_file(cmd.output_prefix + ".summary.json", summary.dump(2) + "\n");

  write_manifest(cmd.output_prefix, "cv", json(cmd),
                 json{{"cv_curve", cmd.output_prefix + ".cv.csv"},
                      {"coefficients", cmd.output_prefix + ".coefficients.csv"},
                      {"summary", cmd.output_prefix + ".summary.json"}});
  return 0;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateCmd {
  std::string rule = "universal-b"; // universal-a | universal-b | orthogonal
  int n = 0;
  int p = 0;
  double sigma = -1.0;
  double alpha = 0.1;
  std::string family = "a";
  double epsilon_prior = -1.0;
  bool high_dim = false;
  std::string input;         // optional: estimate sigma from data
  std::string output_prefix; // optional
};

void to_json(json& j, const CalibrateCmd& c) {
  j = json{{"rule", c.rule},
           {"n", c.n},
           {"p", c.p},
           {"sigma", c.sigma},
           {"alpha", c.alpha},
           {"family", c.family},
           {"epsilon_prior", c.epsilon_prior},
           {"high_dim", c.high_dim},
           {"input", c.input},
           {"output_prefix", c.output_prefix}};
}
void from_json(const json& j, CalibrateCmd& c) {
  j.at("rule").get_to(c.rule);
  j.at("n").get_to(c.n);
  j.at("p").get_to(c.p);
  j.at("sigma").get_to(c.sigma);
  j.at("alpha").get_to(c.alpha);
  j.at("family").get_to(c.family);
  j.at("epsilon_prior").get_to(c.epsilon_prior);
  j.at("high_dim").get_to(c.high_dim);
  j.at("input").get_to(c.input);
  j.at("output_prefix").get_to(c.output_prefix);
}

int run_calibrate(const CalibrateCmd& cmd_in) {
  CalibrateCmd cmd = cmd_in;
  if (cmd.sigma <= 0.0) {
    if (cmd.input.empty()) {
      throw std::runtime_error(
          "calibrate: provide --sigma or --input for a plug-in estimate");
    }
    const LoadedData data = load_regression_csv(cmd.input);
    cmd.sigma = estimate_sigma(data.raw, SolverConfig{});
    if (cmd.n == 0) cmd.n = data.raw.n();
    if (cmd.p == 0) cmd.p = data.raw.p();
  }
  std::ostringstream os;
  os << "rule=" << cmd.rule << '\n';
  if (cmd.rule == "universal-a") {
    const TuningPair t = universal_twin_a(
        {cmd.n, cmd.p, cmd.sigma,
         cmd.epsilon_prior > 0 ? std::optional<double>(cmd.epsilon_prior)
                               : std::nullopt});
    os << "lambda=" << format_double(t.lambda) << '\n'
       << "tau=" << format_double(t.tau) << '\n';
  } else if (cmd.rule == "universal-b") {
    const TuningPair t = universal_twin_b(
        {cmd.n, cmd.p, cmd.sigma,
         cmd.epsilon_prior > 0 ? std::optional<double>(cmd.epsilon_prior)
                               : std::nullopt},
        cmd.high_dim);
    os << "lambda=" << format_double(t.lambda) << '\n'
       << "tau=" << format_double(t.tau) << '\n';
  } else if (cmd.rule == "orthogonal") {
    const TwinFamily fam = cmd.family == "b" ? TwinFamily::B : TwinFamily::A;
    const Calibration cal = calibrate_orthogonal({cmd.alpha, cmd.p, cmd.sigma}, fam);
    os << "lambda=" << format_double(cal.lambda) << '\n'
       << "tau=" << format_double(cal.tau) << '\n'
       << "target=" << format_double(cal.target) << '\n';
  } else {
    throw std::runtime_error("unknown rule '" + cmd.rule + "'");
  }
  os << "sigma=" << format_double(cmd.sigma) << '\n';
  std::cout << os.str();
  if (!cmd.output_prefix.empty()) {
    write_file(cmd.output_prefix + ".calibration.txt", os.str());
    write_manifest(cmd.output_prefix, "calibrate", json(cmd),
                   json{{"calibration", cmd.output_prefix + ".calibration.txt"}});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchCmd {
  SimScenario scenario;
  std::string output_prefix;
  std::string methods = "twin-a,twin-b,lasso,mcp,scad";
  int reps = 20;
  std::vector<double> taus = {0.1};
  int n_lambda = 100;
  double lambda_min_ratio = -1.0;
  int test_size = 5000;
  int jobs = 1;
  bool no_center = false;
  PenaltyOptions pen; // shape parameters for the comparators
  SolverOptions solver;
};

void to_json(json& j, const BenchCmd& c) {
  j = json{{"scenario", c.scenario},
           {"output_prefix", c.output_prefix},
           {"methods", c.methods},
           {"reps", c.reps},
           {"taus", c.taus},
           {"n_lambda", c.n_lambda},
           {"lambda_min_ratio", c.lambda_min_ratio},
           {"test_size", c.test_size},
           {"jobs", c.jobs},
           {"no_center", c.no_center},
           {"penalty_options", c.pen},
           {"solver_options", c.solver}};
}
void from_json(const json& j, BenchCmd& c) {
  j.at("scenario").get_to(c.scenario);
  j.at("output_prefix").get_to(c.output_prefix);
  j.at("methods").get_to(c.methods);
  j.at("reps").get_to(c.reps);
  j.at("taus").get_to(c.taus);
  j.at("n_lambda").get_to(c.n_lambda);
  j.at("lambda_min_ratio").get_to(c.lambda_min_ratio);
  j.at("test_size").get_to(c.test_size);
  j.at("jobs").get_to(c.jobs);
  j.at("no_center").get_to(c.no_center);
  j.at("penalty_options").get_to(c.pen);
  j.at("solver_options").get_to(c.solver);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

int run_bench(const BenchCmd& cmd) {
  if (cmd.reps < 1) throw std::runtime_error("bench: --reps must be >= 1");
  if (cmd.taus.empty()) throw std::runtime_error("bench: empty tau list");
  const Algorithm twin_alg = build_algorithm(cmd.solver.algorithm);
  const bool sweep = cmd.taus.size() > 1;
  std::vector<MethodSpec> methods;
  for (const std::string& name : split_list(cmd.methods)) {
    if (name == "twin-a" || name == "twin-b") {
      for (double tau : cmd.taus) {
        PenaltyOptions po = cmd.pen;
        po.penalty = name;
        po.tau = tau;
        std::string label = name;
        if (sweep) label += "(tau=" + format_double(tau) + ")";
        methods.push_back({label, build_spec(po, 1.0), twin_alg});
      }
    } else if (name == "lasso" || name == "mcp" || name == "scad") {
      PenaltyOptions po = cmd.pen;
      po.penalty = name;
      methods.push_back({name, build_spec(po, 1.0), Algorithm::CD});
    } else {
      throw std::runtime_error("bench: unknown method '" + name + "'");
    }
  }
  if (methods.empty()) throw std::runtime_error("bench: no methods requested");

  BenchConfig cfg;
  cfg.n_lambda = cmd.n_lambda;
  cfg.lambda_min_ratio = cmd.lambda_min_ratio;
  cfg.test_size = cmd.test_size;
  cfg.solver = build_solver(cmd.solver);
  cfg.center_response = !cmd.no_center;
  cfg.jobs = cmd.jobs;

  const SelectionReport report = run_replications(cmd.scenario, methods, cmd.reps, cfg);
  std::ostringstream os;
  write_report_csv(os, report);
  write_file(cmd.output_prefix + ".report.csv", os.str());
  write_manifest(cmd.output_prefix, "bench", json(cmd),
                 json{{"report", cmd.output_prefix + ".report.csv"}});
  return 0;
}

// ---------------------------------------------------------------------------
// dataset

struct DatasetCmd {
  SimScenario scenario;
  std::string output_prefix;
};

void to_json(json& j, const DatasetCmd& c) {
  j = json{{"scenario", c.scenario}, {"output_prefix", c.output_prefix}};
}
void from_json(const json& j, DatasetCmd& c) {
  j.at("scenario").get_to(c.scenario);
  j.at("output_prefix").get_to(c.output_prefix);
}

int run_dataset(const DatasetCmd& cmd) {
  const SimDataset ds = make_dataset(cmd.scenario);
  std::vector<std::string> header(1, "y");
  for (int j = 1; j <= cmd.scenario.p; ++j) header.push_back("x" + std::to_string(j));
  std::ostringstream os;
  write_regression_csv(os, header, ds.problem.y, ds.problem.X);
  write_file(cmd.output_prefix + ".csv", os.str());

  json meta;
  meta["scenario"] = cmd.scenario;
  meta["sigma"] = ds.sigma;
  meta["snr_realized"] = ds.snr_realized;
  meta["seed"] = cmd.scenario.seed;
  meta["beta_true"] = std::vector<double>(ds.beta_true.data(),
                                          ds.beta_true.data() + ds.beta_true.size());
  meta["active_true"] = ds.active_true;
  write_file(cmd.output_prefix + ".meta.json", meta.dump(2) + "\n");

  write_manifest(cmd.output_prefix, "dataset", json(cmd),
                 json{{"data", cmd.output_prefix + ".csv"},
                      {"meta", cmd.output_prefix + ".meta.json"}});
  return 0;
}

// ---------------------------------------------------------------------------
// replay

int run_replay(const std::string& manifest_path, const std::string& out_dir) {
  std::ifstream is(manifest_path);
  if (!is) throw std::runtime_error("cannot open manifest '" + manifest_path + "'");
  json j;
  is >> j;
  const std::string command = j.at("command");
  const json& cfg = j.at("config");
  if (command == "fit") {
    FitCmd c = cfg.get<FitCmd>();
    c.output_prefix = redirect_prefix(c.output_prefix, out_dir);
    return run_fit(c);
  }
  if (command == "path") {
    PathCmd c = cfg.get<PathCmd>();
    c.output_prefix = redirect_prefix(c.output_prefix, out_dir);
    return run_path(c);
  }
  if (command == "cv") {
    CvCmd c = cfg.get<CvCmd>();
    c.output_prefix = redirect_prefix(c.output_prefix, out_dir);
    return run_cv(c);
  }
  if (command == "calibrate") {
    CalibrateCmd c = cfg.get<CalibrateCmd>();
    c.output_prefix = redirect_prefix(c.output_prefix, out_dir);
    return run_calibrate(c);
  }
  if (command == "bench") {
    BenchCmd c = cfg.get<BenchCmd>();
    c.output_prefix = redirect_prefix(c.output_prefix, out_dir);
    return run_bench(c);
  }
  if (command == "dataset") {
    DatasetCmd c = cfg.get<DatasetCmd>();
    c.output_prefix = redirect_prefix(c.output_prefix, out_dir);
    return run_dataset(c);
  }
  throw std::runtime_error("manifest has unknown command '" + command + "'");
}

// ---------------------------------------------------------------------------

void add_penalty_flags(CLI::App* app, PenaltyOptions& po, bool with_kind = true) {
  if (with_kind) {
    app->add_option("--penalty", po.penalty, "twin-a | twin-b | lasso | mcp | scad")
        ->check(CLI::IsMember({"twin-a", "twin-b", "lasso", "mcp", "scad"}));
  }
  app->add_option("--tau", po.tau, "peak location for the TWIN penalties");
  app->add_option("--twin-h", po.h, "flat-tail height for twin-b, in (0,1)");
  app->add_option("--mcp-shape", po.mcp_shape, "gamma for MCP");
  app->add_option("--scad-shape", po.scad_shape, "a for SCAD");
}

void add_solver_flags(CLI::App* app, SolverOptions& so) {
  app->add_option("--algorithm", so.algorithm, "cd | mclla")
      ->check(CLI::IsMember({"cd", "mclla"}));
  app->add_option("--max-sweeps", so.max_sweeps);
  app->add_option("--tol", so.tol, "relative coordinate-change tolerance");
  app->add_option("--order", so.order, "random | cyclic")
      ->check(CLI::IsMember({"random", "cyclic"}));
  app->add_option("--seed", so.seed, "rng seed");
  app->add_option("--lla-iters", so.lla_iters, "outer iterations for mclla");
  app->add_option("--kkt-tol", so.kkt_tol);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse linear regression with two-mountain (TWIN) penalties"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file (flags win)");

  FitCmd fit_cmd;
  CLI::App* fit_app = app.add_subcommand("fit", "fit at a single lambda");
  fit_app->add_option("--input", fit_cmd.input, "CSV: response, then predictors")
      ->required();
  fit_app->add_option("--output-prefix", fit_cmd.output_prefix)->required();
  fit_app->add_option("--lambda", fit_cmd.lambda)->required();
  fit_app->add_flag("--no-center", fit_cmd.no_center, "skip response centering");
  add_penalty_flags(fit_app, fit_cmd.pen);
  add_solver_flags(fit_app, fit_cmd.solver);

  PathCmd path_cmd;
  CLI::App* path_app = app.add_subcommand("path", "fit a regularization path");
  path_app->add_option("--input", path_cmd.input)->required();
  path_app->add_option("--output-prefix", path_cmd.output_prefix)->required();
  path_app->add_option("--n-lambda", path_cmd.n_lambda);
  path_app->add_option("--lambda-min-ratio", path_cmd.lambda_min_ratio);
  path_app->add_flag("--no-center", path_cmd.no_center);
  add_penalty_flags(path_app, path_cmd.pen);
  add_solver_flags(path_app, path_cmd.solver);

  CvCmd cv_cmd;
  CLI::App* cv_app = app.add_subcommand("cv", "k-fold cross-validation");
  cv_app->add_option("--input", cv_cmd.input)->required();
  cv_app->add_option("--output-prefix", cv_cmd.output_prefix)->required();
  cv_app->add_option("--folds", cv_cmd.folds)->check(CLI::PositiveNumber);
  cv_app->add_option("--n-lambda", cv_cmd.n_lambda);
  cv_app->add_option("--lambda-min-ratio", cv_cmd.lambda_min_ratio);
  cv_app->add_flag("--no-center", cv_cmd.no_center);
  add_penalty_flags(cv_app, cv_cmd.pen);
  add_solver_flags(cv_app, cv_cmd.solver);

  CalibrateCmd cal_cmd;
  CLI::App* cal_app =
      app.add_subcommand("calibrate", "universal and orthogonal tuning rules");
  cal_app->add_option("--rule", cal_cmd.rule, "universal-a | universal-b | orthogonal")
      ->check(CLI::IsMember({"universal-a", "universal-b", "orthogonal"}));
  cal_app->add_option("--n", cal_cmd.n);
  cal_app->add_option("--p", cal_cmd.p);
  cal_app->add_option("--sigma", cal_cmd.sigma,
                      "noise sd; omit to estimate from --input");
  cal_app->add_option("--alpha", cal_cmd.alpha, "target level for the orthogonal rule");
  cal_app->add_option("--family", cal_cmd.family, "a | b (orthogonal rule)")
      ->check(CLI::IsMember({"a", "b"}));
  cal_app->add_option("--epsilon-prior", cal_cmd.epsilon_prior,
                      "prior sparsity bound for the high-dimensional rule");
  cal_app->add_flag("--high-dim", cal_cmd.high_dim);
  cal_app->add_option("--input", cal_cmd.input, "CSV for the plug-in sigma estimate");
  cal_app->add_option("--output-prefix", cal_cmd.output_prefix);

  BenchCmd bench_cmd;
  std::string scenario_path;
  std::string tau_list;
  long long seed_override = -1;
  CLI::App* bench_app =
      app.add_subcommand("bench", "replicate a scenario and score selections");
  bench_app->add_option("--scenario", scenario_path, "key = value scenario file")
      ->required();
  bench_app->add_option("--output-prefix", bench_cmd.output_prefix)->required();
  bench_app->add_option("--methods", bench_cmd.methods,
                        "comma list from {twin-a,twin-b,lasso,mcp,scad}");
  bench_app->add_option("--reps", bench_cmd.reps, "number of replications");
  bench_app->add_option("--tau-sweep", tau_list, "comma list of tau values");
  bench_app->add_option("--n-lambda", bench_cmd.n_lambda);
  bench_app->add_option("--lambda-min-ratio", bench_cmd.lambda_min_ratio);
  bench_app->add_option("--test-size", bench_cmd.test_size,
                        "-1 keeps the scenario value");
  bench_app->add_option("--jobs", bench_cmd.jobs, "parallel replications");
  bench_app->add_option("--scenario-seed", seed_override, "override the scenario seed");
  bench_app->add_flag("--no-center", bench_cmd.no_center);
  add_penalty_flags(bench_app, bench_cmd.pen, /*with_kind=*/false);
  add_solver_flags(bench_app, bench_cmd.solver);

  DatasetCmd data_cmd;
  std::string data_scenario_path;
  CLI::App* data_app =
      app.add_subcommand("dataset", "generate a dataset with sidecar metadata");
  data_app->add_option("--scenario", data_scenario_path)->required();
  data_app->add_option("--output-prefix", data_cmd.output_prefix)->required();

  std::string manifest_path, replay_dir;
  CLI::App* replay_app = app.add_subcommand("replay", "re-run a recorded manifest");
  replay_app->add_option("--manifest", manifest_path)->required();
  replay_app->add_option("--output-dir", replay_dir,
                         "redirect outputs (default: original locations)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_app->parsed()) return run_fit(fit_cmd);
    if (path_app->parsed()) return run_path(path_cmd);
    if (cv_app->parsed()) return run_cv(cv_cmd);
    if (cal_app->parsed()) return run_calibrate(cal_cmd);
    if (bench_app->parsed()) {
      const ScenarioFile sf = parse_scenario_file(scenario_path);
      bench_cmd.scenario = sf.scenario;
      if (seed_override >= 0) {
        bench_cmd.scenario.seed = static_cast<std::uint64_t>(seed_override);
      }
      if (bench_cmd.test_size < 0) bench_cmd.test_size = sf.test_size;
      if (!tau_list.empty()) {
        bench_cmd.taus.clear();
        for (const std::string& tok : split_list(tau_list)) {
          bench_cmd.taus.push_back(parse_double(tok));
        }
      } else {
        bench_cmd.taus = {bench_cmd.pen.tau};
      }
      return run_bench(bench_cmd);
    }
    if (data_app->parsed()) {
      const ScenarioFile sf = parse_scenario_file(data_scenario_path);
      data_cmd.scenario = sf.scenario;
      return run_dataset(data_cmd);
    }
    if (replay_app->parsed()) return run_replay(manifest_path, replay_dir);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return 0;
}
