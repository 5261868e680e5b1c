#include "twinreg/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "twinreg/random.hpp"
#include "twinreg/stats.hpp"

namespace twinreg {

namespace {

void check_inputs(const UniversalInputs& in) {
  if (in.n < 1 || in.p < 1) throw std::invalid_argument("universal rule: n, p must be >= 1");
  if (!(in.sigma > 0.0)) throw std::invalid_argument("universal rule: sigma must be positive");
}

PenaltySpec family_spec(TwinFamily family, double lambda, double tau) {
  return family == TwinFamily::A ? twin_a(lambda, tau) : twin_b(lambda, tau);
}

} // namespace

TuningPair universal_twin_a(const UniversalInputs& in) {
  check_inputs(in);
  const double delta = static_cast<double>(in.n) / in.p;
  const double root = 1.0 / std::sqrt(delta);
  if (!(0.99 - root > 0.0)) {
    throw std::invalid_argument(
        "universal TWIN-a rule requires n sufficiently larger than p "
        "(n/p > (1/0.99)^2)");
  }
  const double lambda =
      (1.0 + root) * in.sigma * std::sqrt(2.0 * std::log(double(in.p)));
  const double tau = lambda / ((0.99 - root) * (0.99 - root));
  return {lambda, tau};
}

TuningPair universal_twin_b(const UniversalInputs& in, bool high_dim) {
  check_inputs(in);
  const double delta = static_cast<double>(in.n) / in.p;
  const double lambda = in.sigma * std::sqrt(2.0 * std::log(double(in.p)));
  double denom;
  if (high_dim) {
    if (!in.epsilon_prior.has_value()) {
      throw std::invalid_argument(
          "universal TWIN-b high-dimensional rule needs a prior sparsity bound");
    }
    const double eps = *in.epsilon_prior;
    if (!(eps > 0.0 && eps < 1.0)) {
      throw std::invalid_argument("epsilon prior must lie in (0,1)");
    }
    denom = 0.99 - std::sqrt((eps / delta + 1.0) / 2.0);
    if (!(denom > 0.0)) {
      throw std::invalid_argument(
          "universal TWIN-b high-dimensional rule requires eps'/delta below "
          "2*0.99^2 - 1");
    }
  } else {
    denom = 0.99 - 1.0 / std::sqrt(delta);
    if (!(denom > 0.0)) {
      throw std::invalid_argument(
          "universal TWIN-b low-dimensional rule requires n/p > (1/0.99)^2");
    }
  }
  return {lambda, lambda / (denom * denom)};
}

Calibration calibrate_orthogonal(const CalibrationTarget& target, TwinFamily family,
                                 const Problem* data) {
  if (target.p < 1) throw std::invalid_argument("calibrate: p must be >= 1");
  if (!(target.sigma > 0.0)) throw std::invalid_argument("calibrate: sigma must be positive");
  if (!(target.alpha >= 0.0 && target.alpha <= 1.0)) {
    throw std::invalid_argument("calibrate: alpha must lie in [0,1]");
  }
  const double tail = target.alpha / (2.0 * target.p);
  if (!(tail > 0.0 && tail < 0.5)) {
    throw std::invalid_argument("calibrate: alpha/(2p) must lie in (0, 1/2)");
  }
  const double q = target.sigma * std_normal_quantile(1.0 - tail);

  // For fixed tau the gap min_t {t + P'(t)} rises with lambda until
  // lambda = tau (where it equals tau) and falls beyond, so we bisect on the
  // rising branch; tau below q cannot reach the target.
  constexpr int kGridPoints = 32;
  const double lo_tau = 0.05 * q, hi_tau = 20.0 * q;
  struct Solution {
    double lambda, tau;
  };
  std::vector<Solution> solutions;
  for (int i = 0; i < kGridPoints; ++i) {
    const double tau =
        lo_tau * std::pow(hi_tau / lo_tau, double(i) / (kGridPoints - 1));
    const double lam_hi = tau;
    if (min_gap(family_spec(family, lam_hi, tau)) < q) continue;
    double lo = std::min(q * 1e-8, lam_hi * 0.5), hi = lam_hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (min_gap(family_spec(family, mid, tau)) < q ? lo : hi) = mid;
      if (hi - lo <= 1e-15 * hi) break;
    }
    const double lam = hi;
    if (std::abs(min_gap(family_spec(family, lam, tau)) - q) <= 1e-8 * q) {
      solutions.push_back({lam, tau});
    }
  }
  if (solutions.empty()) {
    throw std::runtime_error(
        "calibrate: no (lambda, tau) reaches the target gap " + std::to_string(q) +
        " on the tau bracket [" + std::to_string(lo_tau) + ", " +
        std::to_string(hi_tau) + "]");
  }

  auto prefer_small = [](const Solution& a, const Solution& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.tau < b.tau;
  };
  Solution best = solutions.front();
  if (data != nullptr) {
    // power rule: keep the pair selecting the most variables
    const Eigen::VectorXd corr = data->X.transpose() * data->y;
    long best_count = -1;
    for (const auto& s : solutions) {
      const PenaltySpec spec = family_spec(family, s.lambda, s.tau);
      long count = 0;
      for (Eigen::Index j = 0; j < corr.size(); ++j) {
        if (threshold(spec, corr[j]) != 0.0) ++count;
      }
      if (count > best_count ||
          (count == best_count && prefer_small(s, best))) {
        best_count = count;
        best = s;
      }
    }
  } else {
    for (const auto& s : solutions) {
      if (prefer_small(s, best)) best = s;
    }
  }
  return {best.lambda, best.tau, q};
}

namespace {

double column_sd(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / std::max<int>(1, v.size() - 1));
}

} // namespace

CvResult cross_validate(const Problem& raw, const PenaltySpec& spec_template,
                        int folds, const SolverConfig& config, Algorithm algorithm,
                        int n_lambda, double lambda_min_ratio,
                        std::uint64_t fold_seed, bool center_response) {
  const int n = raw.n(), p = raw.p();
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
  if (n < folds) throw std::invalid_argument("cross_validate: need n >= folds");

  CvResult out;

  // Shared grid from the full data so fold curves align.
  Problem full = raw;
  double y_mean = 0.0;
  if (center_response) {
    y_mean = full.y.mean();
    full.y.array() -= y_mean;
  }
  const Problem full_std = standardize(full);
  out.lambdas =
      path_lambda_grid(full_std, spec_template, n_lambda, lambda_min_ratio, algorithm);
  const std::size_t n_grid = out.lambdas.size();

  // fold of shuffled index i is i % folds
  Rng rng(fold_seed);
  std::vector<int> order = rng.permutation(n);
  std::vector<int> fold_of(n);
  for (int i = 0; i < n; ++i) fold_of[order[i]] = i % folds;

  std::vector<double> sse(n_grid, 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows, test_rows;
    for (int i = 0; i < n; ++i) {
      (fold_of[i] == f ? test_rows : train_rows).push_back(i);
    }
    Eigen::VectorXd y_tr(train_rows.size());
    Eigen::MatrixXd x_tr(train_rows.size(), p);
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      y_tr[i] = raw.y[train_rows[i]];
      x_tr.row(i) = raw.X.row(train_rows[i]);
    }
    if (column_sd(y_tr) == 0.0) {
      out.warnings.push_back("fold " + std::to_string(f) +
                             " has zero-variance response; fold retained");
    }
    double m = 0.0;
    if (center_response) {
      m = y_tr.mean();
      y_tr.array() -= m;
    }
    const Problem train_std = standardize(make_problem(std::move(y_tr), std::move(x_tr)));
    const PathResult path =
        fit_path(train_std, spec_template, out.lambdas, config, algorithm);
    for (std::size_t i = 0; i < n_grid; ++i) {
      const Eigen::VectorXd beta_orig = to_original_scale(train_std, path.fits[i].beta);
      for (int row : test_rows) {
        const double pred = raw.X.row(row).dot(beta_orig) + m;
        const double e = raw.y[row] - pred;
        sse[i] += e * e;
      }
    }
  }

  out.cv_curve.resize(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) out.cv_curve[i] = sse[i] / n;
  out.best_index = 0;
  for (std::size_t i = 1; i < n_grid; ++i) {
    // strict improvement keeps the larger lambda on ties
    if (out.cv_curve[i] < out.cv_curve[out.best_index]) {
      out.best_index = static_cast<int>(i);
    }
  }
  out.best_lambda = out.lambdas[out.best_index];
  return out;
}

double estimate_sigma(const Problem& raw, const SolverConfig& config,
                      bool center_response) {
  Problem pr = raw;
  if (center_response) pr.y.array() -= pr.y.mean();
  const Problem std_pr = standardize(pr);
  const int n = pr.n(), p = pr.p();
  double sigma = column_sd(raw.y);
  if (!(sigma > 0.0)) return 0.0;
  for (int it = 0; it < 2; ++it) {
    const double lam = sigma * std::sqrt(2.0 * std::log(double(p)));
    const FitResult fr = fit_cd(std_pr, lasso(lam), config);
    const double df = static_cast<double>(fr.active_set.size());
    const double rss = (std_pr.y - std_pr.X * fr.beta).squaredNorm();
    sigma = std::sqrt(rss / std::max(1.0, n - df));
  }
  return sigma;
}

} // namespace twinreg
