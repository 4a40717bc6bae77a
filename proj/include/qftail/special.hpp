#pragma once

namespace qftail::special {

/// Standard normal CDF, computed through erfc so both tails keep full relative precision.
double normal_cdf(double x);

/// 1 - Phi(x).
double normal_sf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// P((Z + a)^2 <= b^2), i.e. 1 - Q_{1/2}(a, b). Accurate in relative terms when small.
double noncentral_chi2_1_cdf(double a, double b);

/// Generalized Marcum Q of order 1/2: P((Z + a)^2 > b^2) for Z ~ N(0, 1).
double marcum_q_half(double a, double b);

/// Lower incomplete gamma gamma(s, x) = int_0^x t^{s-1} e^{-t} dt (unregularized).
/// Series for x < s + 1, Lentz continued fraction otherwise; throws
/// Error(IterationLimit) after 500 iterations.
double lower_incomplete_gamma(double s, double x);

/// log gamma(s, x); finite for x > 0 even when gamma(s, x) underflows.
double log_lower_incomplete_gamma(double s, double x);

/// Regularized P(s, x) = gamma(s, x) / Gamma(s).
double regularized_lower_gamma(double s, double x);

}  // namespace qftail::special
