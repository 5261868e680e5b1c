#include "twinreg/simulate.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <Eigen/QR>

namespace twinreg {

void validate_scenario(const SimScenario& sc) {
  if (sc.n < 1 || sc.p < 1) throw std::invalid_argument("scenario: n, p must be >= 1");
  if (sc.k < 1 || sc.k > sc.p) throw std::invalid_argument("scenario: need 1 <= k <= p");
  if (!(std::abs(sc.rho) < 1.0)) throw std::invalid_argument("scenario: |rho| must be < 1");
  if (sc.scheme == CoefScheme::GeometricDecay &&
      !(sc.decay_c > 0.0 && sc.decay_c < 1.0)) {
    throw std::invalid_argument("scenario: decay_c must lie in (0,1)");
  }
  if (!(sc.snr > 0.0)) throw std::invalid_argument("scenario: snr must be positive");
  if (sc.design_kind == DesignKind::Orthonormal && sc.p > sc.n) {
    throw std::invalid_argument("scenario: orthonormal design needs p <= n");
  }
}

Eigen::MatrixXd gen_design(const SimScenario& sc, Rng& rng) {
  validate_scenario(sc);
  Eigen::MatrixXd X(sc.n, sc.p);
  switch (sc.design_kind) {
    case DesignKind::AR1: {
      const double carry = sc.rho;
      const double fresh = std::sqrt(1.0 - sc.rho * sc.rho);
      for (int i = 0; i < sc.n; ++i) {
        double prev = rng.normal();
        X(i, 0) = prev;
        for (int j = 1; j < sc.p; ++j) {
          prev = carry * prev + fresh * rng.normal();
          X(i, j) = prev;
        }
      }
      break;
    }
    case DesignKind::IIDGaussian: {
      const double scale = 1.0 / std::sqrt(double(sc.n));
      for (int i = 0; i < sc.n; ++i) {
        for (int j = 0; j < sc.p; ++j) X(i, j) = scale * rng.normal();
      }
      break;
    }
    case DesignKind::Orthonormal: {
      Eigen::MatrixXd G(sc.n, sc.p);
      for (int i = 0; i < sc.n; ++i) {
        for (int j = 0; j < sc.p; ++j) G(i, j) = rng.normal();
      }
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
      X = qr.householderQ() * Eigen::MatrixXd::Identity(sc.n, sc.p);
      break;
    }
  }
  return X;
}

std::pair<Eigen::VectorXd, std::vector<int>> gen_coefficients(const SimScenario& sc,
                                                              Rng& rng) {
  validate_scenario(sc);
  std::vector<int> active = rng.sample_without_replacement(sc.p, sc.k);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(sc.p);
  if (sc.scheme == CoefScheme::UniformMagnitude) {
    for (int j : active) {
      const double mag = rng.uniform(0.5, 2.0);
      beta[j] = rng.uniform() < 0.5 ? -mag : mag;
    }
  } else {
    for (int i = 0; i < sc.k; ++i) {
      beta[active[i]] = std::pow(-sc.decay_c, i);
    }
  }
  return {beta, active};
}

double ar1_quadratic_form(const Eigen::VectorXd& beta, double rho) {
  const int p = static_cast<int>(beta.size());
  // sum_i beta_i^2 + 2 sum_{i<j} beta_i beta_j rho^{j-i} via a right-to-left
  // suffix recursion
  double quad = beta.squaredNorm();
  double suffix = 0.0;
  for (int i = p - 2; i >= 0; --i) {
    suffix = rho * (beta[i + 1] + suffix);
    quad += 2.0 * beta[i] * suffix;
  }
  return quad;
}

std::pair<Eigen::VectorXd, double> gen_response(const Eigen::MatrixXd& design,
                                                const Eigen::VectorXd& beta_true,
                                                const SimScenario& sc, Rng& rng) {
  if (design.cols() != beta_true.size()) {
    throw std::invalid_argument("gen_response: dimension mismatch");
  }
  if (beta_true.isZero(0.0)) {
    throw std::invalid_argument("gen_response: SNR undefined for beta = 0");
  }
  double quad;
  if (sc.design_kind == DesignKind::AR1) {
    quad = ar1_quadratic_form(beta_true, sc.rho);
  } else {
    quad = beta_true.squaredNorm() / sc.n; // Sigma = I/n convention
  }
  const double sigma = std::sqrt(quad) / sc.snr;
  Eigen::VectorXd y = design * beta_true;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * rng.normal();
  return {std::move(y), sigma};
}

SimDataset make_dataset(const SimScenario& sc, Rng& rng) {
  SimDataset ds;
  Eigen::MatrixXd X = gen_design(sc, rng);
  auto [beta, active] = gen_coefficients(sc, rng);
  auto [y, sigma] = gen_response(X, beta, sc, rng);
  ds.snr_realized = sigma > 0.0 ? std::sqrt((X * beta).squaredNorm() / sc.n) / sigma
                                : std::numeric_limits<double>::infinity();
  ds.problem = make_problem(std::move(y), std::move(X));
  ds.beta_true = std::move(beta);
  ds.active_true = std::move(active);
  ds.sigma = sigma;
  return ds;
}

SimDataset make_dataset(const SimScenario& sc) {
  Rng rng(sc.seed);
  return make_dataset(sc, rng);
}

namespace {

ReplicationCurves run_one_replication(const SimScenario& scenario,
                                      const std::vector<MethodSpec>& methods,
                                      int rep, const BenchConfig& cfg) {
  SimScenario sc = scenario;
  sc.seed = scenario.seed + static_cast<std::uint64_t>(rep);
  Rng rng(sc.seed);
  SimDataset train = make_dataset(sc, rng);

  // test set drawn anew for every replication
  SimScenario test_sc = sc;
  test_sc.n = std::max(1, cfg.test_size);
  Eigen::MatrixXd x_test = gen_design(test_sc, rng);
  Eigen::VectorXd y_test = x_test * train.beta_true;
  for (Eigen::Index i = 0; i < y_test.size(); ++i) {
    y_test[i] += train.sigma * rng.normal();
  }

  Problem centered = train.problem;
  double y_mean = 0.0;
  if (cfg.center_response) {
    y_mean = centered.y.mean();
    centered.y.array() -= y_mean;
  }
  const Problem std_pr = standardize(centered);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  ReplicationCurves curves;
  for (const MethodSpec& method : methods) {
    MetricCurve curve;
    const auto grid = path_lambda_grid(std_pr, method.spec, cfg.n_lambda,
                                       cfg.lambda_min_ratio, method.algorithm);
    curve.lambda = grid;
    curve.fdr.assign(grid.size(), nan);
    curve.tdr.assign(grid.size(), nan);
    curve.model_size.assign(grid.size(), nan);
    curve.rmse.assign(grid.size(), nan);
    try {
      const PathResult path =
          fit_path(std_pr, method.spec, grid, cfg.solver, method.algorithm);
      for (std::size_t i = 0; i < path.fits.size(); ++i) {
        const FitResult& fr = path.fits[i];
        SelectionOutcome outcome{fr.active_set, train.active_true, sc.p};
        curve.fdr[i] = fdr(outcome);
        curve.tdr[i] = tdr(outcome);
        curve.model_size[i] = static_cast<double>(fr.active_set.size());
        const Eigen::VectorXd beta_orig = to_original_scale(std_pr, fr.beta);
        curve.rmse[i] = rmse(beta_orig, x_test, y_test, y_mean);
      }
    } catch (const SolverError&) {
      // leave the cells missing
    }
    curves.emplace(method.name, std::move(curve));
  }
  return curves;
}

} // namespace

std::vector<ReplicationCurves> run_replication_curves(
    const SimScenario& scenario, const std::vector<MethodSpec>& methods,
    int n_reps, const BenchConfig& cfg) {
  if (n_reps < 1) throw std::invalid_argument("run_replications: n_reps must be >= 1");
  validate_scenario(scenario);
  std::vector<ReplicationCurves> reps(n_reps);
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (int r = 0; r < n_reps; ++r) {
      reps[r] = run_one_replication(scenario, methods, r, cfg);
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (int r = next.fetch_add(1); r < n_reps; r = next.fetch_add(1)) {
          reps[r] = run_one_replication(scenario, methods, r, cfg);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return reps;
}

SelectionReport run_replications(const SimScenario& scenario,
                                 const std::vector<MethodSpec>& methods,
                                 int n_reps, const BenchConfig& cfg) {
  return aggregate(run_replication_curves(scenario, methods, n_reps, cfg));
}

} // namespace twinreg
