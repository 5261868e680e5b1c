#include "twinreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "twinreg/random.hpp"

namespace twinreg {

namespace {

void require_standardized(const Problem& pr, const char* who) {
  if (!pr.standardized) {
    throw std::invalid_argument(std::string(who) + ": problem must be standardized");
  }
}

std::vector<int> nonzero_indices(const Eigen::VectorXd& beta) {
  std::vector<int> idx;
  for (int j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) idx.push_back(j);
  }
  return idx;
}

double soft(double z, double t) {
  double a = std::abs(z) - t;
  return a > 0.0 ? std::copysign(a, z) : 0.0;
}

// One pass over the given coordinates; returns the largest coefficient move.
template <typename Update>
double sweep(const Problem& pr, Eigen::VectorXd& beta, Eigen::VectorXd& r,
             const std::vector<int>& order, Update&& update) {
  double max_delta = 0.0;
  for (int j : order) {
    const double zj = pr.X.col(j).dot(r) + beta[j];
    const double nb = update(j, zj);
    const double d = nb - beta[j];
    if (d != 0.0) {
      r.noalias() -= d * pr.X.col(j);
      beta[j] = nb;
      max_delta = std::max(max_delta, std::abs(d));
    }
  }
  return max_delta;
}

// Shared driver for CD and the MCLLA inner loop. Coordinate order is
// redrawn each sweep under RandomPermutation; above the active-set
// threshold, converged active-set sweeps alternate with full sweeps.
struct DescentState {
  int sweeps = 0;
  bool converged = false;
};

template <typename Update>
DescentState run_descent(const Problem& pr, const PenaltySpec& spec,
                         const SolverConfig& cfg, Eigen::VectorXd& beta,
                         Eigen::VectorXd& r, Rng& rng,
                         std::vector<double>* trace, int sweep_budget,
                         Update&& update) {
  const int p = pr.p();
  DescentState st;
  std::vector<int> full(p);
  std::iota(full.begin(), full.end(), 0);
  const bool use_active = p > cfg.active_set_threshold;
  bool active_phase = false;
  std::vector<int> active;

  for (int s = 0; s < sweep_budget; ++s) {
    std::vector<int>& order = active_phase ? active : full;
    if (cfg.coordinate_order == CoordinateOrder::RandomPermutation) {
      rng.shuffle(order);
    }
    const double max_delta = sweep(pr, beta, r, order, update);
    ++st.sweeps;
    if (trace) trace->push_back(objective_value(pr, spec, beta));
    if (!beta.allFinite()) {
      throw SolverError("coordinate descent produced non-finite values");
    }
    const double scale = std::max(1.0, beta.cwiseAbs().maxCoeff());
    const bool settled = max_delta <= cfg.tol * scale;
    if (!use_active) {
      if (settled) {
        st.converged = true;
        break;
      }
      continue;
    }
    if (active_phase) {
      if (settled) active_phase = false; // verify with a full sweep
    } else {
      if (settled) {
        st.converged = true;
        break;
      }
      active = nonzero_indices(beta);
      if (!active.empty()) active_phase = true;
    }
  }
  return st;
}

FitResult finalize(const Problem& pr, const PenaltySpec& spec,
                   const SolverConfig& cfg, Eigen::VectorXd beta, int sweeps,
                   bool converged, std::vector<double> trace) {
  FitResult out;
  out.beta = std::move(beta);
  out.active_set = nonzero_indices(out.beta);
  out.objective = objective_value(pr, spec, out.beta);
  out.sweeps_used = sweeps;
  out.converged = converged;
  out.kkt_max_violation = kkt_check(pr, spec, out.beta, cfg.kkt_tol).max_violation;
  out.sweep_objectives = std::move(trace);
  return out;
}

void validate_config(const SolverConfig& cfg) {
  if (cfg.max_sweeps < 1 || cfg.lla_outer_iters < 1) {
    throw std::invalid_argument("solver config: iteration counts must be >= 1");
  }
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0) || !(cfg.kkt_tol > 0.0)) {
    throw std::invalid_argument("solver config: tolerances out of range");
  }
}

Eigen::VectorXd initial_beta(const Problem& pr, const Eigen::VectorXd* warm) {
  if (warm == nullptr) return Eigen::VectorXd::Zero(pr.p());
  if (warm->size() != pr.p()) {
    throw std::invalid_argument("warm start has wrong dimension");
  }
  return *warm;
}

} // namespace

double objective_value(const Problem& pr, const PenaltySpec& spec,
                       const Eigen::VectorXd& beta) {
  double pen = 0.0;
  for (int j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) pen += value(spec, std::abs(beta[j]));
  }
  return 0.5 * (pr.y - pr.X * beta).squaredNorm() + pen;
}

double lambda_max(const Problem& pr) {
  require_standardized(pr, "lambda_max");
  return (pr.X.transpose() * pr.y).cwiseAbs().maxCoeff();
}

FitResult fit_cd(const Problem& pr, const PenaltySpec& spec,
                 const SolverConfig& cfg, const Eigen::VectorXd* warm_start) {
  require_standardized(pr, "fit_cd");
  validate_config(cfg);
  Eigen::VectorXd beta = initial_beta(pr, warm_start);
  Eigen::VectorXd r = pr.y - pr.X * beta;
  Rng rng(cfg.rng_seed);
  std::vector<double> trace;
  auto st = run_descent(pr, spec, cfg, beta, r, rng,
                        cfg.trace_objective ? &trace : nullptr, cfg.max_sweeps,
                        [&](int, double zj) { return threshold(spec, zj); });
  return finalize(pr, spec, cfg, std::move(beta), st.sweeps, st.converged,
                  std::move(trace));
}

FitResult fit_mclla(const Problem& pr, const PenaltySpec& spec,
                    const SolverConfig& cfg, const Eigen::VectorXd* warm_start) {
  require_standardized(pr, "fit_mclla");
  validate_config(cfg);
  if (!is_twin(spec)) {
    throw std::invalid_argument("fit_mclla: spec must be a TWIN penalty");
  }
  const double lam = lambda_of(spec);
  const int p = pr.p();
  Eigen::VectorXd beta = initial_beta(pr, warm_start);
  Eigen::VectorXd r = pr.y - pr.X * beta;
  Rng rng(cfg.rng_seed);
  std::vector<double> trace;
  Eigen::VectorXd weights(p);
  int total_sweeps = 0;
  bool inner_converged = false;

  for (int outer = 0; outer < cfg.lla_outer_iters; ++outer) {
    std::vector<int> signs_before(p);
    for (int j = 0; j < p; ++j) {
      signs_before[j] = (beta[j] > 0.0) - (beta[j] < 0.0);
      weights[j] = beta[j] == 0.0 ? lam : derivative(spec, std::abs(beta[j]));
    }
    auto st = run_descent(pr, spec, cfg, beta, r, rng,
                          cfg.trace_objective ? &trace : nullptr, cfg.max_sweeps,
                          [&](int j, double zj) {
                            const double w = weights[j];
                            if (w >= 0.0) return soft(zj, w);
                            // negative tangent slope: the surrogate pushes the
                            // magnitude outward
                            return zj == 0.0 ? 0.0
                                             : std::copysign(std::abs(zj) - w, zj);
                          });
    total_sweeps += st.sweeps;
    inner_converged = st.converged;
    bool stable = true;
    for (int j = 0; j < p && stable; ++j) {
      stable = signs_before[j] == ((beta[j] > 0.0) - (beta[j] < 0.0));
    }
    if (stable) break;
  }
  return finalize(pr, spec, cfg, std::move(beta), total_sweeps, inner_converged,
                  std::move(trace));
}

FitResult fit(const Problem& pr, const PenaltySpec& spec, const SolverConfig& cfg,
              Algorithm algorithm, const Eigen::VectorXd* warm_start) {
  return algorithm == Algorithm::CD ? fit_cd(pr, spec, cfg, warm_start)
                                    : fit_mclla(pr, spec, cfg, warm_start);
}

std::vector<double> path_lambda_grid(const Problem& pr,
                                     const PenaltySpec& spec_template,
                                     int n_lambda, double lambda_min_ratio,
                                     Algorithm algorithm) {
  require_standardized(pr, "path_lambda_grid");
  if (n_lambda <= 0) n_lambda = 100;
  if (lambda_min_ratio <= 0.0) {
    lambda_min_ratio = pr.p() > pr.n() ? 0.05 : 0.001;
  }
  const double s_max = lambda_max(pr);
  if (!(s_max > 0.0)) {
    throw std::invalid_argument("path_lambda_grid: lambda_max is zero");
  }
  std::vector<double> lambdas(n_lambda);
  for (int i = 0; i < n_lambda; ++i) {
    const double f =
        n_lambda == 1 ? 1.0
                      : std::pow(lambda_min_ratio,
                                 static_cast<double>(i) / (n_lambda - 1));
    const double s = s_max * f;
    lambdas[i] = algorithm == Algorithm::CD
                     ? lambda_for_selection_threshold(spec_template, s)
                     : s;
  }
  // keep the first fit empty even when the operator ties at s_max exactly
  lambdas[0] *= 1.0 + 1e-10;
  return lambdas;
}

PathResult fit_path(const Problem& pr, const PenaltySpec& spec_template,
                    const std::vector<double>& lambdas, const SolverConfig& cfg,
                    Algorithm algorithm) {
  require_standardized(pr, "fit_path");
  if (lambdas.empty()) throw std::invalid_argument("fit_path: empty lambda grid");
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] < lambdas[i - 1])) {
      throw std::invalid_argument("fit_path: lambdas must be strictly decreasing");
    }
  }
  PathResult out;
  out.lambdas = lambdas;
  out.tau = tau_of(spec_template);
  out.fits.reserve(lambdas.size());
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(pr.p());
  for (double lam : lambdas) {
    const PenaltySpec spec = with_lambda(spec_template, lam);
    FitResult fr = fit(pr, spec, cfg, algorithm, &warm);
    warm = fr.beta;
    out.fits.push_back(std::move(fr));
  }
  return out;
}

PathResult fit_path(const Problem& pr, const PenaltySpec& spec_template,
                    int n_lambda, double lambda_min_ratio, const SolverConfig& cfg,
                    Algorithm algorithm) {
  return fit_path(pr, spec_template,
                  path_lambda_grid(pr, spec_template, n_lambda, lambda_min_ratio,
                                   algorithm),
                  cfg, algorithm);
}

KktReport kkt_check(const Problem& pr, const PenaltySpec& spec,
                    const Eigen::VectorXd& beta, double tol) {
  require_standardized(pr, "kkt_check");
  if (beta.size() != pr.p()) {
    throw std::invalid_argument("kkt_check: beta has wrong dimension");
  }
  const Eigen::VectorXd g = pr.X.transpose() * (pr.y - pr.X * beta);
  const double lam = lambda_of(spec);
  double worst = 0.0;
  for (int j = 0; j < beta.size(); ++j) {
    double v;
    if (beta[j] != 0.0) {
      const double sgn = beta[j] > 0.0 ? 1.0 : -1.0;
      v = std::abs(g[j] - sgn * derivative(spec, std::abs(beta[j])));
    } else {
      v = std::max(0.0, std::abs(g[j]) - lam);
    }
    worst = std::max(worst, v);
  }
  return {worst, worst <= tol};
}

} // namespace twinreg
