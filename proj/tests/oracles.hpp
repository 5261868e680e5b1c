// Test-only reference implementations, kept independent of the library code
// paths they are used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Direct transliterations of the piecewise penalty formulas in long double,
// with the derived constants written out as rationals.
inline long double twin_a_value(long double lam, long double tau, long double t) {
  const long double c = tau / 2.0L;
  const long double m1 = 4.0L / 3.0L;
  const long double d1 = 32.0L / 27.0L;
  if (t <= m1 * tau) {
    const long double u = 1.0L - t / tau;
    return lam * c * (1.0L - u * u);
  }
  return lam * c * d1 * tau / t;
}

inline long double twin_b_value(long double lam, long double tau, long double h,
                                long double t) {
  const long double c = tau / 2.0L;
  const long double m2 = 1.0L + std::sqrt((1.0L - h) / 2.0L);
  const long double d2 = (1.0L + std::sqrt(2.0L * (1.0L - h))) * tau;
  if (t <= m2 * tau) {
    const long double u = 1.0L - t / tau;
    return lam * c * (1.0L - u * u);
  }
  if (t < d2) {
    const long double u = t - d2;
    return lam * c * (u * u / (tau * tau) + h);
  }
  return lam * c * h;
}

// Brute-force minimizer of 0.5 (z - t)^2 + pen(|t|) over a grid on
// [lo, hi], refined around the best point down to fine_step.
template <typename Pen>
double grid_minimize(const Pen& pen, double z, double lo, double hi,
                     double step, double fine_step) {
  long double best_v = std::numeric_limits<long double>::infinity();
  double best_t = lo;
  auto obj = [&](double t) {
    const long double d = static_cast<long double>(z) - t;
    return 0.5L * d * d + pen(std::abs(t));
  };
  const long long n = static_cast<long long>((hi - lo) / step) + 1;
  for (long long i = 0; i <= n; ++i) {
    const double t = lo + static_cast<double>(i) * step;
    const long double v = obj(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  double s = step;
  while (s > fine_step) {
    const double ns = std::max(fine_step, s / 32.0);
    const double wlo = std::max(lo, best_t - 2.0 * s);
    const double whi = std::min(hi, best_t + 2.0 * s);
    for (double t = wlo; t <= whi; t += ns) {
      const long double v = obj(t);
      if (v < best_v) {
        best_v = v;
        best_t = t;
      }
    }
    s = ns;
  }
  return static_cast<double>(best_v);
}

// Scalar grid minimizer for arbitrary 1-d functions.
template <typename F>
std::pair<double, double> grid_argmin(const F& f, double lo, double hi, double step) {
  double best_t = lo, best_v = f(lo);
  const long long n = static_cast<long long>((hi - lo) / step) + 1;
  for (long long i = 0; i <= n; ++i) {
    const double t = lo + static_cast<double>(i) * step;
    const double v = f(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  return {best_t, best_v};
}

inline double soft_threshold(double z, double t) {
  const double a = std::abs(z) - t;
  return a > 0.0 ? std::copysign(a, z) : 0.0;
}

// Textbook cyclic-coordinate-descent lasso on unit-norm columns.
inline Eigen::VectorXd lasso_cd_reference(const Eigen::MatrixXd& X,
                                          const Eigen::VectorXd& y, double lam,
                                          const Eigen::VectorXd& warm,
                                          double tol = 1e-12,
                                          int max_sweeps = 50000) {
  Eigen::VectorXd beta = warm;
  Eigen::VectorXd r = y - X * beta;
  const int p = static_cast<int>(X.cols());
  for (int s = 0; s < max_sweeps; ++s) {
    double max_d = 0.0;
    for (int j = 0; j < p; ++j) {
      const double zj = X.col(j).dot(r) + beta[j];
      const double nb = soft_threshold(zj, lam);
      const double d = nb - beta[j];
      if (d != 0.0) {
        r -= d * X.col(j);
        beta[j] = nb;
        max_d = std::max(max_d, std::abs(d));
      }
    }
    if (max_d <= tol * std::max(1.0, beta.cwiseAbs().maxCoeff())) break;
  }
  return beta;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<int> idx(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) idx[i] = static_cast<int>(i);
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return v[i] < v[j]; });
    std::vector<double> rk(v.size());
    std::size_t i = 0;
    while (i < idx.size()) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * (i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) rk[idx[k]] = avg;
      i = j + 1;
    }
    return rk;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const std::size_t n = a.size();
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

} // namespace oracle
