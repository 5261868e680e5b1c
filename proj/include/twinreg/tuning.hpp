#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twinreg/penalty.hpp"
#include "twinreg/problem.hpp"
#include "twinreg/solver.hpp"

namespace twinreg {

struct UniversalInputs {
  int n = 0;
  int p = 0;
  double sigma = 1.0;
  std::optional<double> epsilon_prior; // prior sparsity bound, needed high-dim
};

struct TuningPair {
  double lambda = 0.0;
  double tau = 0.0;
};

/// lambda = (1 + delta^-1/2) sigma sqrt(2 log p), tau = (0.99 - delta^-1/2)^-2 lambda,
/// with delta = n/p. Requires 0.99 > delta^-1/2.
TuningPair universal_twin_a(const UniversalInputs& inputs);

/// lambda = sigma sqrt(2 log p); tau uses (0.99 - delta^-1/2)^-2 in low
/// dimensions or [0.99 - sqrt((eps'/delta + 1)/2)]^-2 when high_dim is set.
TuningPair universal_twin_b(const UniversalInputs& inputs, bool high_dim);

struct CalibrationTarget {
  double alpha = 0.1;
  int p = 0;
  double sigma = 1.0;
};

enum class TwinFamily { A, B };

struct Calibration {
  double lambda = 0.0;
  double tau = 0.0;
  double target = 0.0; // sigma * Phi^-1(1 - alpha/2p)
};

/// Solves min_t { t + P'(t) } = sigma Phi^-1(1 - alpha/2p) over a log grid of
/// tau, bisecting in lambda where the gap is monotone. Among solutions,
/// prefers the pair selecting the most variables on `data` when given,
/// otherwise the smallest lambda (then smallest tau).
Calibration calibrate_orthogonal(const CalibrationTarget& target, TwinFamily family,
                                 const Problem* data = nullptr);

struct CvResult {
  std::vector<double> lambdas;
  std::vector<double> cv_curve; // mean held-out squared prediction error
  double best_lambda = 0.0;
  int best_index = 0;
  std::vector<std::string> warnings;
};

/// K-fold cross-validation over the path grid of the full data. Fold
/// assignment is a seeded shuffle of row indices dealt round-robin; ties in
/// the curve resolve toward the larger lambda.
CvResult cross_validate(const Problem& raw, const PenaltySpec& spec_template,
                        int folds, const SolverConfig& config, Algorithm algorithm,
                        int n_lambda = 100, double lambda_min_ratio = -1.0,
                        std::uint64_t fold_seed = 1, bool center_response = true);

/// Plug-in noise scale: start from sd(y), then twice refit a lasso at
/// sigma_hat * sqrt(2 log p) and re-estimate from the residuals.
double estimate_sigma(const Problem& raw, const SolverConfig& config,
                      bool center_response = true);

} // namespace twinreg
