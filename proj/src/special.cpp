#include "qftail/special.hpp"

#include "qftail/error.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qftail::special {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEps = 1e-16;

double clamp01(double v) {
    return std::clamp(v, 0.0, 1.0);
}

// log of the series sum_{n>=0} x^n / (s (s+1) ... (s+n)); gamma(s,x) = x^s e^{-x} * that.
double log_series_factor(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n <= kMaxIterations; ++n) {
        term *= x / (s + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) return std::log(sum);
    }
    throw Error(Errc::IterationLimit, fmt::format("incomplete gamma series did not converge (s={}, x={})", s, x));
}

// log of the continued fraction for Gamma(s,x) / (x^s e^{-x}) (modified Lentz).
double log_continued_fraction(double s, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIterations; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) return std::log(h);
    }
    throw Error(Errc::IterationLimit,
                fmt::format("incomplete gamma continued fraction did not converge (s={}, x={})", s, x));
}

void check_gamma_args(double s, double x) {
    if (!(s > 0.0) || !(x >= 0.0)) {
        throw Error(Errc::InvalidArgument, fmt::format("incomplete gamma requires s > 0, x >= 0 (s={}, x={})", s, x));
    }
}

}  // namespace

double normal_cdf(double x) {
    return clamp01(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

double normal_sf(double x) {
    return clamp01(0.5 * std::erfc(x / std::numbers::sqrt2));
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double noncentral_chi2_1_cdf(double a, double b) {
    a = std::abs(a);
    b = std::abs(b);
    if (b == 0.0) return 0.0;
    if (a == 0.0) {
        return clamp01(std::erf(b / std::numbers::sqrt2));
    }
    // Short intervals: Poisson mixture of central chi-square CDFs, all terms positive.
    const double lambda = 0.5 * a * a;
    if (b < 1.0 && lambda < 200.0) {
        const double x = 0.5 * b * b;
        double sum = 0.0;
        double log_weight = -lambda;  // log Poisson(k; lambda) at k = 0
        for (int k = 0; k <= kMaxIterations; ++k) {
            const double term = std::exp(log_weight) * regularized_lower_gamma(0.5 + k, x);
            sum += term;
            if (k > lambda && term < sum * kEps) return clamp01(sum);
            log_weight += std::log(lambda) - std::log(k + 1.0);
        }
        throw Error(Errc::IterationLimit, "non-central chi-square mixture did not converge");
    }
    // Phi(b - a) - Phi(-b - a), written with upper tails so a large a keeps precision.
    return clamp01(0.5 * (std::erfc((a - b) / std::numbers::sqrt2) - std::erfc((a + b) / std::numbers::sqrt2)));
}

double marcum_q_half(double a, double b) {
    a = std::abs(a);
    b = std::abs(b);
    if (b == 0.0) return 1.0;
    if (b > a) {
        // Q = P(Z > b - a) + P(Z < -b - a), both terms are tails here.
        return clamp01(normal_sf(b - a) + normal_sf(b + a));
    }
    return clamp01(1.0 - noncentral_chi2_1_cdf(a, b));
}

double log_lower_incomplete_gamma(double s, double x) {
    check_gamma_args(s, x);
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x < s + 1.0) {
        return s * std::log(x) - x + log_series_factor(s, x);
    }
    // gamma = Gamma(s) - Gamma(s, x).
    const double log_upper = s * std::log(x) - x + log_continued_fraction(s, x);
    const double lg = std::lgamma(s);
    return lg + std::log1p(-std::exp(log_upper - lg));
}

double lower_incomplete_gamma(double s, double x) {
    check_gamma_args(s, x);
    if (x == 0.0) return 0.0;
    return std::exp(log_lower_incomplete_gamma(s, x));
}

double regularized_lower_gamma(double s, double x) {
    check_gamma_args(s, x);
    if (x == 0.0) return 0.0;
    return clamp01(std::exp(log_lower_incomplete_gamma(s, x) - std::lgamma(s)));
}

}  // namespace qftail::special
