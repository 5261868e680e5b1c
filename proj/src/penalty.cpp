#include "twinreg/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace twinreg {

namespace {

constexpr double kD1 = 32.0 / 27.0;
constexpr double kM1 = 4.0 / 3.0;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

struct TwinBGeom {
  double m2t; // m2 * tau
  double d2;
  double slope; // sqrt((1-h)/2), magnitude of P'/lambda at m2*tau
};

TwinBGeom geom(const TwinBParams& b) {
  const double s = std::sqrt((1.0 - b.h) / 2.0);
  return {(1.0 + s) * b.tau, (1.0 + 2.0 * s) * b.tau, s};
}

double soft(double z, double t) {
  double a = std::abs(z) - t;
  return a > 0.0 ? std::copysign(a, z) : 0.0;
}

} // namespace

PenaltySpec twin_a(double lambda, double tau) {
  require(lambda > 0.0 && std::isfinite(lambda), "twin_a: lambda must be positive");
  require(tau > 0.0 && std::isfinite(tau), "twin_a: tau must be positive");
  return TwinAParams{lambda, tau};
}

PenaltySpec twin_b(double lambda, double tau, double h) {
  require(lambda > 0.0 && std::isfinite(lambda), "twin_b: lambda must be positive");
  require(tau > 0.0 && std::isfinite(tau), "twin_b: tau must be positive");
  require(h > 0.0 && h < 1.0, "twin_b: h must lie in (0,1)");
  return TwinBParams{lambda, tau, h};
}

PenaltySpec lasso(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), "lasso: lambda must be positive");
  return ComparatorParams{ComparatorKind::Lasso, lambda, 0.0};
}

PenaltySpec mcp(double lambda, double shape) {
  require(lambda > 0.0 && std::isfinite(lambda), "mcp: lambda must be positive");
  require(shape > 1.0, "mcp: shape must exceed 1");
  return ComparatorParams{ComparatorKind::Mcp, lambda, shape};
}

PenaltySpec scad(double lambda, double shape) {
  require(lambda > 0.0 && std::isfinite(lambda), "scad: lambda must be positive");
  require(shape > 2.0, "scad: shape must exceed 2");
  return ComparatorParams{ComparatorKind::Scad, lambda, shape};
}

double lambda_of(const PenaltySpec& spec) {
  return std::visit([](const auto& s) { return s.lambda; }, spec);
}

double tau_of(const PenaltySpec& spec) {
  if (const auto* a = std::get_if<TwinAParams>(&spec)) return a->tau;
  if (const auto* b = std::get_if<TwinBParams>(&spec)) return b->tau;
  return 0.0;
}

bool is_twin(const PenaltySpec& spec) {
  return !std::holds_alternative<ComparatorParams>(spec);
}

PenaltySpec with_lambda(const PenaltySpec& spec, double lambda) {
  PenaltySpec out = spec;
  std::visit([&](auto& s) { s.lambda = lambda; }, out);
  require(lambda > 0.0 && std::isfinite(lambda), "with_lambda: lambda must be positive");
  return out;
}

std::string penalty_name(const PenaltySpec& spec) {
  if (std::holds_alternative<TwinAParams>(spec)) return "twin-a";
  if (std::holds_alternative<TwinBParams>(spec)) return "twin-b";
  switch (std::get<ComparatorParams>(spec).kind) {
    case ComparatorKind::Lasso: return "lasso";
    case ComparatorKind::Mcp: return "mcp";
    case ComparatorKind::Scad: return "scad";
  }
  return "?";
}

double value(const PenaltySpec& spec, double t) {
  require(t >= 0.0 && std::isfinite(t), "value: t must be a finite nonnegative real");
  if (const auto* a = std::get_if<TwinAParams>(&spec)) {
    const double lam = a->lambda, tau = a->tau;
    if (t <= kM1 * tau) {
      // lambda*c*(1 - (1 - t/tau)^2) with c = tau/2
      return lam * (t - t * t / (2.0 * tau));
    }
    return (16.0 / 27.0) * lam * tau * tau / t;
  }
  if (const auto* b = std::get_if<TwinBParams>(&spec)) {
    const double lam = b->lambda, tau = b->tau;
    const TwinBGeom g = geom(*b);
    if (t <= g.m2t) return lam * (t - t * t / (2.0 * tau));
    if (t < g.d2) {
      const double u = t - g.d2;
      return lam * u * u / (2.0 * tau) + 0.5 * lam * tau * b->h;
    }
    return 0.5 * lam * tau * b->h;
  }
  const auto& c = std::get<ComparatorParams>(spec);
  const double lam = c.lambda;
  switch (c.kind) {
    case ComparatorKind::Lasso:
      return lam * t;
    case ComparatorKind::Mcp: {
      const double g = c.shape;
      if (t <= g * lam) return lam * t - t * t / (2.0 * g);
      return 0.5 * g * lam * lam;
    }
    case ComparatorKind::Scad: {
      const double a = c.shape;
      if (t <= lam) return lam * t;
      if (t <= a * lam) return (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0));
      return 0.5 * lam * lam * (a + 1.0);
    }
  }
  return 0.0;
}

double derivative(const PenaltySpec& spec, double t) {
  require(t > 0.0 && std::isfinite(t), "derivative: t must be a finite positive real");
  if (const auto* a = std::get_if<TwinAParams>(&spec)) {
    const double lam = a->lambda, tau = a->tau;
    if (t <= kM1 * tau) return lam * (1.0 - t / tau);
    return -(16.0 / 27.0) * lam * tau * tau / (t * t);
  }
  if (const auto* b = std::get_if<TwinBParams>(&spec)) {
    const double lam = b->lambda, tau = b->tau;
    const TwinBGeom g = geom(*b);
    if (t <= g.m2t) return lam * (1.0 - t / tau);
    if (t < g.d2) return lam * (t - g.d2) / tau;
    return 0.0;
  }
  const auto& c = std::get<ComparatorParams>(spec);
  const double lam = c.lambda;
  switch (c.kind) {
    case ComparatorKind::Lasso:
      return lam;
    case ComparatorKind::Mcp:
      return t <= c.shape * lam ? lam - t / c.shape : 0.0;
    case ComparatorKind::Scad: {
      const double a = c.shape;
      if (t <= lam) return lam;
      if (t <= a * lam) return (a * lam - t) / (a - 1.0);
      return 0.0;
    }
  }
  return 0.0;
}

double derivative_at_zero_plus(const PenaltySpec& spec) { return lambda_of(spec); }

namespace detail {

double tail_stationary_root(double z, double kappa, double bracket_lo) {
  // theta^3 - z theta^2 - kappa = 0 has exactly one positive root for
  // z >= 0, kappa > 0, and it exceeds z.
  const double A = z * z * z / 27.0 + 0.5 * kappa;
  const double S = std::sqrt(z * z * z * kappa / 27.0 + 0.25 * kappa * kappa);
  const double w = std::cbrt(A + S);
  // cbrt(A - S) = (z^2/9)/w since (A-S)(A+S) = z^6/729; this form avoids
  // the cancellation in A - S for large z.
  double th = z / 3.0 + w + (z * z / 9.0) / w;
  for (int i = 0; i < 2; ++i) {
    const double g = th * th * th - z * th * th - kappa;
    const double gp = 3.0 * th * th - 2.0 * z * th;
    if (gp > 0.0) th -= g / gp;
  }
  const double resid = th * th * th - z * th * th - kappa;
  if (std::abs(resid) > 1e-8 * std::max(1.0, std::abs(z * z * z))) {
    // precision loss: bisect on the stationarity equation over the interval
    // that must contain any admissible root
    double lo = std::max(bracket_lo, z);
    double hi = z + kappa / (bracket_lo * bracket_lo);
    auto g = [&](double t) { return t * t * t - z * t * t - kappa; };
    if (g(lo) > 0.0 || g(hi) < 0.0) return th; // keep the Cardano value
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) < 0.0 ? lo : hi) = mid;
    }
    th = 0.5 * (lo + hi);
  }
  return th;
}

} // namespace detail

double threshold(const PenaltySpec& spec, double z) {
  require(std::isfinite(z), "threshold: z must be finite");
  if (z == 0.0) return 0.0;
  const double sign = z < 0.0 ? -1.0 : 1.0;
  const double az = std::abs(z);

  if (const auto* c = std::get_if<ComparatorParams>(&spec)) {
    const double lam = c->lambda;
    switch (c->kind) {
      case ComparatorKind::Lasso:
        return soft(z, lam);
      case ComparatorKind::Mcp: {
        const double g = c->shape;
        if (az > g * lam) return z;
        return soft(z, lam) / (1.0 - 1.0 / g);
      }
      case ComparatorKind::Scad: {
        const double a = c->shape;
        if (az > a * lam) return z;
        if (az > 2.0 * lam) return ((a - 1.0) * z - sign * a * lam) / (a - 2.0);
        return soft(z, lam);
      }
    }
  }

  // TWIN variants: enumerate the per-branch stationary points plus the
  // breakpoints, evaluate the objective at each, keep the best. Ties go to
  // the larger magnitude, so candidates are scanned in descending order.
  std::vector<double> cands;
  cands.push_back(0.0);
  const double lam = lambda_of(spec);
  const double tau = tau_of(spec);
  const double denom = 1.0 - lam / tau;
  if (const auto* a = std::get_if<TwinAParams>(&spec)) {
    const double m1t = kM1 * tau;
    cands.push_back(m1t);
    if (denom > 0.0) {
      const double th1 = (az - lam) / denom;
      if (th1 > 0.0 && th1 <= m1t) cands.push_back(th1);
    }
    const double kappa = (16.0 / 27.0) * a->lambda * tau * tau;
    const double th3 = detail::tail_stationary_root(az, kappa, m1t);
    if (th3 > m1t) cands.push_back(th3);
  } else {
    const auto& b = std::get<TwinBParams>(spec);
    const TwinBGeom g = geom(b);
    cands.push_back(g.m2t);
    cands.push_back(g.d2);
    if (denom > 0.0) {
      const double th1 = (az - lam) / denom;
      if (th1 > 0.0 && th1 <= g.m2t) cands.push_back(th1);
    }
    const double th2 = (az + lam * g.d2 / tau) / (1.0 + lam / tau);
    if (th2 > g.m2t && th2 < g.d2) cands.push_back(th2);
    if (az >= g.d2) cands.push_back(az);
  }

  std::sort(cands.begin(), cands.end(), std::greater<>());
  double best = cands.front();
  double best_obj = 0.5 * (az - best) * (az - best) + value(spec, best);
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const double th = cands[i];
    const double obj = 0.5 * (az - th) * (az - th) + value(spec, th);
    if (obj < best_obj) {
      best = th;
      best_obj = obj;
    }
  }
  return best == 0.0 ? 0.0 : sign * best;
}

GammaRegion gamma_region(const PenaltySpec& spec, double eps_deriv) {
  if (const auto* b = std::get_if<TwinBParams>(&spec)) {
    return {false, geom(*b).d2};
  }
  if (const auto* a = std::get_if<TwinAParams>(&spec)) {
    const double eps = eps_deriv > 0.0 ? eps_deriv : 1e-6 * a->lambda;
    // |P'(t)| = (16/27) lambda tau^2 / t^2 = eps
    return {true, a->tau * std::sqrt((16.0 / 27.0) * a->lambda / eps)};
  }
  throw std::invalid_argument("gamma_region: defined for TWIN penalties only");
}

double min_gap(const PenaltySpec& spec) {
  require(is_twin(spec), "min_gap: defined for TWIN penalties only");
  const double lam = lambda_of(spec);
  const double tau = tau_of(spec);
  // g(t) = t + P'(t) is linear on the rising branch and increasing on every
  // branch past it, so the minimum sits at t -> 0+ or at a breakpoint.
  double best = lam; // g(0+)
  auto consider = [&](double t) { best = std::min(best, t + derivative(spec, t)); };
  if (std::holds_alternative<TwinAParams>(spec)) {
    consider(kM1 * tau);
  } else {
    const TwinBGeom g = geom(std::get<TwinBParams>(spec));
    consider(g.m2t);
    consider(g.d2);
  }
  return best;
}

namespace {

// q(theta) = theta/2 + P(theta)/theta; threshold() maps z to zero exactly
// when |z| <= inf q.
double zero_region_edge(const PenaltySpec& spec) {
  const double lam = lambda_of(spec);
  if (!is_twin(spec)) return lam;
  const double tau = tau_of(spec);
  auto q = [&](double th) { return 0.5 * th + value(spec, th) / th; };
  double best = lam; // q(0+)
  if (const auto* a = std::get_if<TwinAParams>(&spec)) {
    const double m1t = kM1 * tau;
    best = std::min(best, q(m1t));
    const double kappa = (16.0 / 27.0) * a->lambda * tau * tau;
    const double thq = std::cbrt(4.0 * kappa);
    if (thq >= m1t) best = std::min(best, q(thq));
  } else {
    const auto& b = std::get<TwinBParams>(spec);
    const TwinBGeom g = geom(b);
    best = std::min(best, q(g.m2t));
    best = std::min(best, q(g.d2));
    const double thq = std::sqrt(lam * (tau * tau * b.h + g.d2 * g.d2) / (tau + lam));
    if (thq > g.m2t && thq < g.d2) best = std::min(best, q(thq));
    const double thf = std::sqrt(lam * tau * b.h);
    if (thf >= g.d2) best = std::min(best, q(thf));
  }
  return best;
}

} // namespace

double selection_threshold(const PenaltySpec& spec) { return zero_region_edge(spec); }

double lambda_for_selection_threshold(const PenaltySpec& spec, double s) {
  require(s > 0.0 && std::isfinite(s), "lambda_for_selection_threshold: s must be positive");
  if (!is_twin(spec)) return s;
  auto edge = [&](double lam) { return selection_threshold(with_lambda(spec, lam)); };
  if (edge(s) >= s) return s; // identity regime (s <= tau)
  double lo = s, hi = s;
  for (int i = 0; i < 200 && edge(hi) < s; ++i) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (edge(mid) < s ? lo : hi) = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  return hi;
}

} // namespace twinreg
