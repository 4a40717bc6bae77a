#pragma once

#include "qftail/canonical.hpp"

#include <cstddef>

namespace qftail {

struct ImhofConfig {
    double abs_tol = 1e-12;       // target absolute error on the CDF value
    double max_interval = 1e12;   // integration is never carried past this point
    std::size_t max_evals = 500000;
};

struct ImhofResult {
    double value = 0.0;           // clamped to [0, 1]
    double raw = 0.0;             // unclamped 1/2 - I/pi
    double error_estimate = 0.0;  // quadrature + truncation, on the CDF scale
    double upper_limit = 0.0;     // last integration point reached
    std::size_t evals = 0;
    /// False when the value sits within 10 abs_tol of zero (or below it): at that
    /// level the result is dominated by cancellation in 1/2 - I/pi.
    bool reliable = true;
};

/// P(S_d <= gamma0) by numerical inversion of the characteristic function (Imhof).
/// Throws Error(QuadratureFailure) if the error estimate exceeds abs_tol within max_evals.
ImhofResult imhof(const CanonicalForm& cf, double gamma0, const ImhofConfig& cfg = {});

inline double imhof_cdf(const CanonicalForm& cf, double gamma0, const ImhofConfig& cfg = {}) {
    return imhof(cf, gamma0, cfg).value;
}

struct SpaConfig {
    double newton_tol = 1e-11;     // on |K'(s) - gamma0|
    std::size_t max_iter = 200;
    double bracket_expansion = 2.0;
};

struct SpaResult {
    double value = 0.0;
    double saddlepoint = 0.0;
    double residual = 0.0;  // |K'(s_hat) - gamma0|
    std::size_t iterations = 0;
};

/// Cumulant generating function of S_d and its first two derivatives; valid for s < 1/(2 lambda_max).
struct Cgf {
    explicit Cgf(const CanonicalForm& cf) : cf_(cf) {}
    double k0(double s) const;
    double k1(double s) const;
    double k2(double s) const;
    double upper_limit() const;  // 1/(2 lambda_max)

private:
    const CanonicalForm& cf_;
};

/// Lugannani-Rice saddle-point approximation of P(S_d <= gamma0). The saddle-point equation
/// K'(s) = gamma0 is solved by Newton's method safeguarded with bisection on a bracket.
/// Throws AtMeanSingularity when gamma0 is within 1e-8 relative of E[S_d], NoConvergence
/// when the root cannot be located within max_iter.
SpaResult spa(const CanonicalForm& cf, double gamma0, const SpaConfig& cfg = {});

inline double spa_cdf(const CanonicalForm& cf, double gamma0, const SpaConfig& cfg = {}) {
    return spa(cf, gamma0, cfg).value;
}

}  // namespace qftail
