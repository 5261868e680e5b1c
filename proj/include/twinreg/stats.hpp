#pragma once

namespace twinreg {

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Standard normal quantile, accurate to well below 1e-9 everywhere in (0,1).
/// Rational approximation refined with one Halley step on the CDF.
double std_normal_quantile(double prob);

} // namespace twinreg
