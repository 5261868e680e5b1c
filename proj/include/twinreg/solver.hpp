#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "twinreg/penalty.hpp"
#include "twinreg/problem.hpp"

namespace twinreg {

enum class CoordinateOrder { Cyclic, RandomPermutation };
enum class Algorithm { CD, MCLLA };

struct SolverConfig {
  int max_sweeps = 1000;
  double tol = 1e-7; // relative max coordinate change
  CoordinateOrder coordinate_order = CoordinateOrder::RandomPermutation;
  std::uint64_t rng_seed = 0;
  int lla_outer_iters = 3;
  double kkt_tol = 1e-4;
  int active_set_threshold = 2000; // active-set cycling kicks in above this p
  bool trace_objective = false;    // record the per-sweep objective, recomputed
                                   // from scratch each sweep
};

struct FitResult {
  Eigen::VectorXd beta;
  std::vector<int> active_set; // indices with beta[j] != 0, ascending
  double objective = 0.0;
  int sweeps_used = 0;
  bool converged = false;
  double kkt_max_violation = 0.0;
  std::vector<double> sweep_objectives; // filled only under trace_objective
};

struct PathResult {
  std::vector<double> lambdas; // strictly decreasing
  std::vector<FitResult> fits;
  double tau = 0.0; // fixed across the path; 0 for comparators
};

struct KktReport {
  double max_violation = 0.0;
  bool pass = false;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Smallest lambda at which the all-zero vector satisfies the stationarity
/// conditions: max_j |x_j' y|. Requires a standardized problem.
double lambda_max(const Problem& problem);

/// Coordinate descent with exact univariate minimization at every update.
FitResult fit_cd(const Problem& problem, const PenaltySpec& spec,
                 const SolverConfig& config,
                 const Eigen::VectorXd* warm_start = nullptr);

/// Outer local-linear-approximation loop around a weighted soft-threshold
/// coordinate descent; stops early once the sign pattern stabilizes.
FitResult fit_mclla(const Problem& problem, const PenaltySpec& spec,
                    const SolverConfig& config,
                    const Eigen::VectorXd* warm_start = nullptr);

FitResult fit(const Problem& problem, const PenaltySpec& spec,
              const SolverConfig& config, Algorithm algorithm,
              const Eigen::VectorXd* warm_start = nullptr);

/// Lambda grid for a path. Geometric in the selection threshold of the
/// univariate operator for CD (which is geometric in lambda itself whenever
/// lambda <= tau, and for all comparator penalties); geometric in lambda for
/// MCLLA, whose entry threshold is always lambda. n_lambda and ratio default
/// to 100 and (p > n ? 0.05 : 0.001) when nonpositive.
std::vector<double> path_lambda_grid(const Problem& problem,
                                     const PenaltySpec& spec_template,
                                     int n_lambda, double lambda_min_ratio,
                                     Algorithm algorithm);

PathResult fit_path(const Problem& problem, const PenaltySpec& spec_template,
                    int n_lambda, double lambda_min_ratio,
                    const SolverConfig& config, Algorithm algorithm);

/// Same, over an explicit (strictly decreasing) lambda sequence.
PathResult fit_path(const Problem& problem, const PenaltySpec& spec_template,
                    const std::vector<double>& lambdas,
                    const SolverConfig& config, Algorithm algorithm);

/// Stationarity check: active coordinates must match the signed derivative,
/// inactive ones must have |x_j' r| <= lambda.
KktReport kkt_check(const Problem& problem, const PenaltySpec& spec,
                    const Eigen::VectorXd& beta, double tol);

/// 0.5 ||y - X beta||^2 + sum_j P(|beta_j|), recomputed from scratch.
double objective_value(const Problem& problem, const PenaltySpec& spec,
                       const Eigen::VectorXd& beta);

} // namespace twinreg
