#include "qftail/bounds.hpp"

#include "qftail/error.hpp"
#include "qftail/special.hpp"

#include <fmt/core.h>

#include <cmath>
#include <limits>
#include <numbers>

namespace qftail {

namespace {

void check_threshold(double gamma0) {
    if (!(gamma0 > 0.0)) {
        throw Error(Errc::NonPositiveThreshold, fmt::format("threshold must be positive, got {}", gamma0));
    }
}

}  // namespace

double marcum_lower_bound(const CanonicalForm& cf, double gamma0) {
    check_threshold(gamma0);
    const double d = static_cast<double>(cf.d());
    double log_p = 0.0;
    for (Eigen::Index i = 0; i < cf.lambdas.size(); ++i) {
        const double b = std::sqrt(gamma0 / (d * cf.lambdas[i]));
        const double f = special::noncentral_chi2_1_cdf(cf.alphas[i], b);
        if (f <= 0.0) return 0.0;
        log_p += std::log(f);
    }
    return std::min(1.0, std::exp(log_p));
}

double zero_mean_lower_bound(const CanonicalForm& cf, double gamma0) {
    check_threshold(gamma0);
    for (Eigen::Index i = 0; i < cf.alphas.size(); ++i) {
        if (cf.alphas[i] != 0.0) {
            throw Error(Errc::NonZeroMean, fmt::format("alpha[{}] = {} is not zero", i, cf.alphas[i]));
        }
    }
    const double d = static_cast<double>(cf.d());
    double log_p = -0.5 * d * std::log(std::numbers::pi);
    for (Eigen::Index i = 0; i < cf.lambdas.size(); ++i) {
        log_p += special::log_lower_incomplete_gamma(0.5, gamma0 / (2.0 * d * cf.lambdas[i]));
    }
    return std::min(1.0, std::exp(log_p));
}

std::optional<double> bre_constant(const CanonicalForm& cf) {
    const double log_pie = std::log(std::numbers::pi * std::numbers::e);
    Eigen::Index zeros = 0;
    for (Eigen::Index i = 0; i < cf.alphas.size(); ++i) zeros += (cf.alphas[i] == 0.0);
    const double d = static_cast<double>(cf.d());
    if (zeros == cf.alphas.size()) {
        return std::exp(d * (log_pie - std::numbers::ln2));
    }
    if (zeros > 0) return std::nullopt;
    double log_c = d * log_pie;
    for (Eigen::Index i = 0; i < cf.alphas.size(); ++i) log_c -= 2.0 * std::log(std::abs(cf.alphas[i]));
    return std::exp(log_c);
}

BoundReport bound_report(const CanonicalForm& cf, double gamma0) {
    BoundReport r;
    r.lower_bound = marcum_lower_bound(cf, gamma0);
    r.bre_constant = bre_constant(cf);
    if (r.bre_constant) {
        r.note = fmt::format(
            "bre_constant bounds limsup E*[1 L^2]/P^2 as gamma0 -> 0; it is not an estimate and grows "
            "exponentially with d (d = {}), so it can be vacuous for large d",
            cf.d());
    } else {
        r.note = "bre_constant unavailable: alphas mix zero and non-zero entries, no bound is established for that case";
    }
    return r;
}

}  // namespace qftail
