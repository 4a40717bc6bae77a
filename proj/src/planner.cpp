#include "qftail/planner.hpp"

#include "qftail/error.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>

namespace qftail {

void validate(const AccuracySpec& spec) {
    if (!(spec.epsilon > 0.0 && spec.epsilon < 1.0)) {
        throw Error(Errc::InvalidArgument, fmt::format("epsilon must lie in (0, 1), got {}", spec.epsilon));
    }
    if (!(spec.confidence_c > 0.0)) {
        throw Error(Errc::InvalidArgument, fmt::format("confidence constant must be positive, got {}", spec.confidence_c));
    }
}

double mc_runs_required(double p, const AccuracySpec& spec) {
    validate(spec);
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(Errc::DegenerateProbability, fmt::format("probability must lie in (0, 1), got {}", p));
    }
    const double k = spec.confidence_c / spec.epsilon;
    return std::max(1.0, std::ceil(k * k * (1.0 - p) / p));
}

double is_runs_from_estimate(const EstimateResult& est, const AccuracySpec& spec) {
    validate(spec);
    if (!(est.estimate > 0.0)) {
        throw Error(Errc::ZeroEstimate, "pilot estimate is zero; cannot plan relative accuracy");
    }
    const double k = spec.confidence_c / (spec.epsilon * est.estimate);
    return std::max(1.0, std::ceil(k * k * est.variance));
}

IsPlan plan_is_runs(const CanonicalForm& cf, double gamma0, const AccuracySpec& spec, std::uint64_t pilot,
                    std::uint64_t seed, const SamplerOptions& opts) {
    validate(spec);
    if (pilot < 1000) throw Error(Errc::InvalidArgument, "pilot run needs at least 1000 samples");
    IsPlan plan;
    plan.pilot = importance_sampling(cf, gamma0, pilot, seed, opts);
    plan.runs = is_runs_from_estimate(plan.pilot, spec);
    return plan;
}

}  // namespace qftail
