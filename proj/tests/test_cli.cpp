#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "twinreg/csv.hpp"
#include "twinreg/simulate.hpp"
#include "twinreg/solver.hpp"

namespace fs = std::filesystem;
using namespace twinreg;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string err;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "twinreg_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args) {
  const fs::path errfile = work_dir() / "stderr.txt";
  const std::string cmd =
      std::string(TWINREG_CLI_PATH) + " " + args + " 2>" + errfile.string();
  const int status = std::system(cmd.c_str());
  RunResult out;
  out.exit_code = WEXITSTATUS(status);
  std::ifstream is(errfile);
  std::stringstream ss;
  ss << is.rdbuf();
  out.err = ss.str();
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path write_scenario(const std::string& name, const std::string& body) {
  const fs::path p = work_dir() / name;
  std::ofstream os(p);
  os << body;
  return p;
}

const std::string kSmallScenario =
    "# smoke scenario\n"
    "n = 60\np = 200\nrho = -0.5\nk = 8\nscheme = uniform\nsnr = 6\n"
    "seed = 17\ndesign = ar1\ntest_size = 120\n";

fs::path fixture_csv() {
  static const fs::path path = [] {
    const fs::path scen = write_scenario("fixture.cfg", kSmallScenario);
    const fs::path prefix = work_dir() / "fixture";
    const RunResult r = run_cli("dataset --scenario " + scen.string() +
                                " --output-prefix " + prefix.string());
    REQUIRE(r.exit_code == 0);
    return fs::path(prefix.string() + ".csv");
  }();
  return path;
}

// variable,coefficient rows (first row is the intercept)
std::vector<std::pair<std::string, double>> read_coefficients(const fs::path& p) {
  std::ifstream is(p);
  REQUIRE(is.good());
  std::string line;
  std::getline(is, line);
  REQUIRE(line == "variable,coefficient");
  std::vector<std::pair<std::string, double>> out;
  while (std::getline(is, line)) {
    const auto f = split_csv_line(line);
    REQUIRE(f.size() == 2);
    out.emplace_back(f[0], parse_double(f[1]));
  }
  return out;
}

} // namespace

TEST_CASE("dataset export round-trips bit-exactly") {
  const fs::path csv = fixture_csv();
  const NumericCsv parsed = read_numeric_csv_file(csv.string());
  SimScenario sc;
  sc.n = 60;
  sc.p = 200;
  sc.rho = -0.5;
  sc.k = 8;
  sc.snr = 6.0;
  sc.seed = 17;
  const SimDataset ds = make_dataset(sc);
  REQUIRE(parsed.values.rows() == 60);
  REQUIRE(parsed.values.cols() == 201);
  CHECK((parsed.values.col(0).array() == ds.problem.y.array()).all());
  for (int j = 0; j < sc.p; ++j) {
    CHECK((parsed.values.col(j + 1).array() == ds.problem.X.col(j).array()).all());
  }
  const json meta = json::parse(slurp(work_dir() / "fixture.meta.json"));
  CHECK(meta.at("sigma").get<double>() == ds.sigma);
  CHECK(meta.at("active_true").get<std::vector<int>>() == ds.active_true);
  const std::vector<double> beta = meta.at("beta_true");
  for (int j = 0; j < sc.p; ++j) CHECK(beta[j] == ds.beta_true[j]);
}

TEST_CASE("fit writes coefficients that satisfy the optimality check") {
  const fs::path csv = fixture_csv();
  const fs::path prefix = work_dir() / "fit1";
  const RunResult r = run_cli("fit --input " + csv.string() + " --output-prefix " +
                              prefix.string() +
                              " --penalty twin-a --tau 0.1 --lambda 800 --seed 3");
  REQUIRE(r.exit_code == 0);

  const json summary = json::parse(slurp(prefix.string() + ".summary.json"));
  CHECK(summary.at("converged").get<bool>());
  CHECK(summary.at("kkt_max_violation").get<double>() <= 1e-4);

  // reload everything from disk and re-verify the stationarity conditions
  const NumericCsv data = read_numeric_csv_file(csv.string());
  const auto coef = read_coefficients(prefix.string() + ".coefficients.csv");
  REQUIRE(coef.size() == 201); // intercept + 200 predictors
  REQUIRE(coef[0].first == "(intercept)");
  const double intercept = coef[0].second;
  Eigen::VectorXd y = data.values.col(0);
  const Eigen::MatrixXd X = data.values.rightCols(200);
  y.array() -= intercept;
  const Problem std_pr = standardize(make_problem(y, X));
  Eigen::VectorXd beta_std(200);
  for (int j = 0; j < 200; ++j) {
    beta_std[j] = coef[j + 1].second * std_pr.column_norms[j];
  }
  CHECK(kkt_check(std_pr, twin_a(800.0, 0.1), beta_std, 1e-4).pass);
}

TEST_CASE("fit above lambda_max writes an all-zero coefficient file") {
  const fs::path csv = fixture_csv();
  const NumericCsv data = read_numeric_csv_file(csv.string());
  Eigen::VectorXd y = data.values.col(0);
  y.array() -= y.mean();
  const Problem std_pr = standardize(make_problem(y, data.values.rightCols(200)));
  const double lmax = lambda_max(std_pr);

  const fs::path prefix = work_dir() / "fit0";
  const RunResult r =
      run_cli("fit --input " + csv.string() + " --output-prefix " + prefix.string() +
              " --penalty lasso --lambda " + format_double(lmax * 1.05));
  REQUIRE(r.exit_code == 0);
  const auto coef = read_coefficients(prefix.string() + ".coefficients.csv");
  for (std::size_t j = 1; j < coef.size(); ++j) CHECK(coef[j].second == 0.0);
  const json summary = json::parse(slurp(prefix.string() + ".summary.json"));
  CHECK(summary.at("active_set").size() == 0);
  CHECK(summary.at("sweeps_used").get<int>() == 1);
}

TEST_CASE("missing and malformed inputs exit with code 2") {
  const RunResult missing = run_cli(
      "fit --input /no/such/file.csv --output-prefix " +
      (work_dir() / "x").string() + " --lambda 1");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("/no/such/file.csv") != std::string::npos);

  const fs::path bad = work_dir() / "bad.csv";
  std::ofstream(bad.string()) << "y,x1\n1.0,2.0\n3.0,oops\n";
  const RunResult malformed = run_cli("fit --input " + bad.string() +
                                      " --output-prefix " +
                                      (work_dir() / "x2").string() + " --lambda 1");
  CHECK(malformed.exit_code == 2);
  CHECK(malformed.err.find("line 3") != std::string::npos);

  // precondition failures from the tuning rules surface as exit 2
  const RunResult cal = run_cli("calibrate --rule universal-a --n 100 --p 100 --sigma 1");
  CHECK(cal.exit_code == 2);
  CHECK(cal.err.find("sufficiently larger") != std::string::npos);
}

TEST_CASE("path output starts all-zero and reruns byte-identically") {
  const fs::path csv = fixture_csv();
  const fs::path prefix = work_dir() / "path1";
  const std::string args = "path --input " + csv.string() + " --output-prefix " +
                           prefix.string() +
                           " --penalty twin-b --tau 0.1 --n-lambda 12 --seed 5";
  REQUIRE(run_cli(args).exit_code == 0);
  const std::string first = slurp(prefix.string() + ".path.csv");

  std::ifstream is(prefix.string() + ".path.csv");
  std::string line;
  std::getline(is, line);
  REQUIRE(line == "lambda,variable,coefficient");
  std::size_t rows = 0;
  std::size_t leading_zeros = 0;
  while (std::getline(is, line)) {
    const auto f = split_csv_line(line);
    REQUIRE(f.size() == 3);
    if (rows < 200 && parse_double(f[2]) == 0.0) ++leading_zeros;
    ++rows;
  }
  REQUIRE(rows == 12 * 200);
  CHECK(leading_zeros == 200); // the first lambda block is the empty model

  REQUIRE(run_cli(args).exit_code == 0);
  CHECK(slurp(prefix.string() + ".path.csv") == first);
}

TEST_CASE("cv runs deterministically and reports the curve") {
  const fs::path csv = fixture_csv();
  const fs::path prefix = work_dir() / "cv1";
  const std::string args = "cv --input " + csv.string() + " --output-prefix " +
                           prefix.string() +
                           " --penalty twin-a --tau 0.1 --folds 4 --n-lambda 12"
                           " --seed 7";
  REQUIRE(run_cli(args).exit_code == 0);
  const std::string first = slurp(prefix.string() + ".cv.csv");
  const NumericCsv curve = read_numeric_csv_file(prefix.string() + ".cv.csv");
  CHECK(curve.values.rows() == 12);
  CHECK(curve.header == std::vector<std::string>{"lambda", "cv_mse"});
  const json summary = json::parse(slurp(prefix.string() + ".summary.json"));
  CHECK(summary.at("best_lambda").get<double>() > 0.0);

  REQUIRE(run_cli(args).exit_code == 0);
  CHECK(slurp(prefix.string() + ".cv.csv") == first);
}

TEST_CASE("calibrate prints machine-readable pairs") {
  const fs::path out = work_dir() / "cal_stdout.txt";
  const std::string cmd = std::string(TWINREG_CLI_PATH) +
                          " calibrate --rule universal-b --n 4000 --p 1000"
                          " --sigma 1 >" +
                          out.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("lambda=3.7169221888498") != std::string::npos);
  CHECK(text.find("tau=15.480725484") != std::string::npos);

  const std::string cmd2 = std::string(TWINREG_CLI_PATH) +
                           " calibrate --rule orthogonal --p 100 --alpha 0.1"
                           " --sigma 2 >" +
                           out.string();
  REQUIRE(std::system(cmd2.c_str()) == 0);
  const std::string text2 = slurp(out);
  CHECK(text2.find("target=6.5810534629838") != std::string::npos);
}

TEST_CASE("bench writes the aggregated report for every method") {
  const fs::path scen = write_scenario(
      "bench.cfg",
      "n = 50\np = 30\nrho = -0.5\nk = 4\nscheme = uniform\nsnr = 6\n"
      "seed = 21\ndesign = ar1\ntest_size = 60\n");
  const fs::path prefix = work_dir() / "bench1";
  const RunResult r = run_cli("bench --scenario " + scen.string() +
                              " --output-prefix " + prefix.string() +
                              " --reps 2 --n-lambda 8 --seed 4");
  REQUIRE(r.exit_code == 0);
  std::ifstream is(prefix.string() + ".report.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line ==
        "method,grid_index,lambda_mean,fdr_mean,fdr_se,tdr_mean,tdr_se,size_mean,"
        "rmse_mean,rmse_se");
  std::set<std::string> methods;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    methods.insert(split_csv_line(line)[0]);
    ++rows;
  }
  CHECK(rows == 5 * 8);
  CHECK(methods ==
        std::set<std::string>{"twin-a", "twin-b", "lasso", "mcp", "scad"});

  // tau sweep: one curve family per tau
  const fs::path prefix2 = work_dir() / "bench_sweep";
  const RunResult r2 = run_cli("bench --scenario " + scen.string() +
                               " --output-prefix " + prefix2.string() +
                               " --methods twin-a --tau-sweep 0.1,0.25,0.5"
                               " --reps 1 --n-lambda 6");
  REQUIRE(r2.exit_code == 0);
  std::ifstream is2(prefix2.string() + ".report.csv");
  std::getline(is2, line);
  std::set<std::string> families;
  rows = 0;
  while (std::getline(is2, line)) {
    families.insert(split_csv_line(line)[0]);
    ++rows;
  }
  CHECK(rows == 3 * 6);
  CHECK(families == std::set<std::string>{"twin-a(tau=0.1)", "twin-a(tau=0.25)",
                                          "twin-a(tau=0.5)"});

  CHECK(run_cli("bench --scenario " + scen.string() + " --output-prefix " +
                (work_dir() / "benchz").string() + " --reps 0")
            .exit_code == 2);
  const fs::path badscen = write_scenario("bad.cfg", "n = 10\nbogus_key = 3\n");
  CHECK(run_cli("bench --scenario " + badscen.string() + " --output-prefix " +
                (work_dir() / "benchb").string())
            .exit_code == 2);
}

TEST_CASE("replaying a manifest reproduces outputs byte for byte") {
  const fs::path csv = fixture_csv();

  // fit
  const fs::path fpre = work_dir() / "rp_fit";
  REQUIRE(run_cli("fit --input " + csv.string() + " --output-prefix " +
                  fpre.string() + " --penalty twin-b --tau 0.2 --lambda 20 --seed 9")
              .exit_code == 0);
  const fs::path fdir = work_dir() / "replay_fit";
  REQUIRE(run_cli("replay --manifest " + fpre.string() + ".manifest.json" +
                  " --output-dir " + fdir.string())
              .exit_code == 0);
  CHECK(slurp(fdir / "rp_fit.coefficients.csv") ==
        slurp(fpre.string() + ".coefficients.csv"));
  CHECK(slurp(fdir / "rp_fit.summary.json") == slurp(fpre.string() + ".summary.json"));

  // bench, with the scenario resolved into the manifest
  const fs::path scen = write_scenario(
      "rp_bench.cfg",
      "n = 40\np = 20\nrho = 0\nk = 3\nscheme = geometric\ndecay_c = 0.8\n"
      "snr = 5\nseed = 33\ndesign = ar1\ntest_size = 50\n");
  const fs::path bpre = work_dir() / "rp_bench";
  REQUIRE(run_cli("bench --scenario " + scen.string() + " --output-prefix " +
                  bpre.string() + " --methods twin-a,lasso --reps 2 --n-lambda 6")
              .exit_code == 0);
  const fs::path bdir = work_dir() / "replay_bench";
  REQUIRE(run_cli("replay --manifest " + bpre.string() + ".manifest.json" +
                  " --output-dir " + bdir.string())
              .exit_code == 0);
  CHECK(slurp(bdir / "rp_bench.report.csv") == slurp(bpre.string() + ".report.csv"));
}
