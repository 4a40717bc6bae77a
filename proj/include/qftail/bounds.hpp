#pragma once

#include "qftail/canonical.hpp"

#include <optional>
#include <string>

namespace qftail {

struct BoundReport {
    double lower_bound = 0.0;
    std::optional<double> bre_constant;
    std::string note;
};

/// prod_i [1 - Q_{1/2}(alpha_i, sqrt(gamma0 / (d lambda_i)))], accumulated in log space.
/// Never exceeds P(S_d <= gamma0).
double marcum_lower_bound(const CanonicalForm& cf, double gamma0);

/// pi^{-d/2} prod_i gamma(1/2, gamma0 / (2 d lambda_i)); requires every alpha_i == 0
/// (throws Error(NonZeroMean) otherwise).
double zero_mean_lower_bound(const CanonicalForm& cf, double gamma0);

/// Limit of E*[1 L^2] / P^2 as gamma0 -> 0: prod pi e / alpha_i^2 if no alpha_i is zero,
/// (pi e / 2)^d if all are zero, empty otherwise. May be +inf for tiny alphas.
std::optional<double> bre_constant(const CanonicalForm& cf);

BoundReport bound_report(const CanonicalForm& cf, double gamma0);

}  // namespace qftail
