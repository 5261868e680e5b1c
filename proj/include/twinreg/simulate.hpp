#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "twinreg/metrics.hpp"
#include "twinreg/problem.hpp"
#include "twinreg/random.hpp"
#include "twinreg/solver.hpp"

namespace twinreg {

enum class CoefScheme { UniformMagnitude, GeometricDecay };
enum class DesignKind { AR1, IIDGaussian, Orthonormal };

struct SimScenario {
  int n = 100;
  int p = 200;
  double rho = 0.0; // AR(1) correlation, |rho| < 1
  int k = 10;       // number of active coefficients
  CoefScheme scheme = CoefScheme::UniformMagnitude;
  double decay_c = 0.8; // geometric-decay base, in (0,1)
  double snr = 3.0;
  std::uint64_t seed = 1;
  DesignKind design_kind = DesignKind::AR1;
};

struct SimDataset {
  Problem problem; // raw, unstandardized
  Eigen::VectorXd beta_true;
  std::vector<int> active_true;
  double sigma = 0.0;
  double snr_realized = 0.0;
};

void validate_scenario(const SimScenario& scenario);

/// AR(1) rows are sampled by the recursion x_1 = e_1,
/// x_j = rho x_{j-1} + sqrt(1-rho^2) e_j, so no p x p factorization is ever
/// formed. IIDGaussian uses N(0, 1/n) entries; Orthonormal takes the Q of a
/// Gaussian draw and needs p <= n.
Eigen::MatrixXd gen_design(const SimScenario& scenario, Rng& rng);

/// Active indices are a uniform draw without replacement. UniformMagnitude
/// samples |beta| from [0.5, 2] with random sign; GeometricDecay assigns
/// (-c)^(j-1) to the j-th sampled index.
std::pair<Eigen::VectorXd, std::vector<int>> gen_coefficients(
    const SimScenario& scenario, Rng& rng);

/// Noise scale is sigma = sqrt(beta' Sigma beta) / snr with the scenario's
/// analytic Sigma (AR(1) quadratic form in O(p); I/n for the other designs).
std::pair<Eigen::VectorXd, double> gen_response(const Eigen::MatrixXd& design,
                                                const Eigen::VectorXd& beta_true,
                                                const SimScenario& scenario,
                                                Rng& rng);

/// beta' Sigma beta for Sigma_ij = rho^|i-j|, in O(p).
double ar1_quadratic_form(const Eigen::VectorXd& beta, double rho);

SimDataset make_dataset(const SimScenario& scenario);
SimDataset make_dataset(const SimScenario& scenario, Rng& rng);

struct MethodSpec {
  std::string name;
  PenaltySpec spec;
  Algorithm algorithm = Algorithm::CD;
};

struct BenchConfig {
  int n_lambda = 100;
  double lambda_min_ratio = -1.0; // auto: 0.05 if p > n else 0.001
  int test_size = 5000;
  SolverConfig solver;
  bool center_response = true;
  int jobs = 1;
};

/// Runs the scenario n_reps times (seed + rep for replication r), fits every
/// method's path, scores per-grid-index FDR/TDR/model size plus RMSE on a
/// fresh test set, and aggregates means and standard errors at matched grid
/// indices. A failed fit leaves its cells missing instead of aborting.
SelectionReport run_replications(const SimScenario& scenario,
                                 const std::vector<MethodSpec>& methods,
                                 int n_reps, const BenchConfig& config);

/// Per-replication curves, exposed for tests and custom aggregation.
std::vector<ReplicationCurves> run_replication_curves(
    const SimScenario& scenario, const std::vector<MethodSpec>& methods,
    int n_reps, const BenchConfig& config);

} // namespace twinreg
