#pragma once

#include <string>
#include <variant>

namespace twinreg {

// Two-mountain penalty, variant (a): quadratic rise peaking at tau, then a
// 1/t tail whose derivative vanishes only in the limit. The normalizer is
// not stored; P'(0+) = lambda forces c = tau/2, and continuity of value and
// derivative at the branch point fixes d1 = 32/27, m1 = 4/3.
struct TwinAParams {
  double lambda = 1.0;
  double tau = 1.0;
};

// Variant (b): same rise, then a quadratic valley that flattens exactly at
// d2 = (1 + sqrt(2(1-h))) * tau with m2 = 1 + sqrt((1-h)/2).
struct TwinBParams {
  double lambda = 1.0;
  double tau = 1.0;
  double h = 0.5;
};

enum class ComparatorKind { Lasso, Mcp, Scad };

struct ComparatorParams {
  ComparatorKind kind = ComparatorKind::Lasso;
  double lambda = 1.0;
  double shape = 0.0; // gamma for MCP (>1), a for SCAD (>2); unused for lasso
};

using PenaltySpec = std::variant<TwinAParams, TwinBParams, ComparatorParams>;

// Validating factories.
PenaltySpec twin_a(double lambda, double tau);
PenaltySpec twin_b(double lambda, double tau, double h = 0.5);
PenaltySpec lasso(double lambda);
PenaltySpec mcp(double lambda, double shape = 1.4);
PenaltySpec scad(double lambda, double shape = 3.7);

double lambda_of(const PenaltySpec& spec);
double tau_of(const PenaltySpec& spec); // 0 for comparators
bool is_twin(const PenaltySpec& spec);
PenaltySpec with_lambda(const PenaltySpec& spec, double lambda);
std::string penalty_name(const PenaltySpec& spec);

/// Penalty value P(t) for t >= 0.
double value(const PenaltySpec& spec, double t);

/// Exact piecewise derivative P'(t) for t > 0.
double derivative(const PenaltySpec& spec, double t);

/// Right limit of the derivative at the origin (= lambda).
double derivative_at_zero_plus(const PenaltySpec& spec);

/// Global minimizer of 0.5*(z - theta)^2 + P(|theta|). Odd in z; at exactly
/// tied objectives the candidate of larger magnitude wins.
double threshold(const PenaltySpec& spec, double z);

struct GammaRegion {
  bool limit_only; // derivative vanishes only asymptotically (variant a)
  double t;        // exact onset, or the epsilon threshold when limit_only
};

/// Onset of the (near) zero-derivative region. For variant (b) this is d2
/// exactly; variant (a) is flagged limit-only together with the t at which
/// |P'| falls below eps_deriv (default 1e-6 * lambda).
GammaRegion gamma_region(const PenaltySpec& spec, double eps_deriv = -1.0);

/// min over t >= 0 of t + P'(t), evaluated from the piecewise closed form.
double min_gap(const PenaltySpec& spec);

/// Largest |z| for which threshold() returns zero. Equals lambda whenever
/// lambda <= tau; drops below lambda in the discontinuous regime.
double selection_threshold(const PenaltySpec& spec);

/// Inverse of selection_threshold in lambda for a fixed shape: the smallest
/// lambda at which inputs of magnitude s are zeroed out.
double lambda_for_selection_threshold(const PenaltySpec& spec, double s);

namespace detail {
// Positive root of theta^3 - z*theta^2 - kappa = 0 (z >= 0, kappa > 0),
// Cardano with a Newton polish and a bisection fallback guarded by the
// residual size.
double tail_stationary_root(double z, double kappa, double bracket_lo);
}

} // namespace twinreg
