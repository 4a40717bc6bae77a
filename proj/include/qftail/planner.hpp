#pragma once

#include "qftail/canonical.hpp"
#include "qftail/sampler.hpp"

#include <cstdint>

namespace qftail {

struct AccuracySpec {
    double epsilon = 0.05;
    double confidence_c = 1.96;
};

void validate(const AccuracySpec& spec);

inline constexpr std::uint64_t kDefaultPilot = 10000;

/// Naive MC runs for relative error epsilon: ceil((C/eps)^2 (1 - p) / p), at least 1.
/// Returned as double since deep tails need more runs than fit in 64 bits.
double mc_runs_required(double p, const AccuracySpec& spec = {});

/// IS runs from an existing estimate: ceil((C / (eps p))^2 V), at least 1.
double is_runs_from_estimate(const EstimateResult& est, const AccuracySpec& spec = {});

struct IsPlan {
    double runs = 0.0;
    EstimateResult pilot;
};

/// Runs a pilot IS estimate of `pilot` samples and plans M* from its (P, V).
IsPlan plan_is_runs(const CanonicalForm& cf, double gamma0, const AccuracySpec& spec,
                    std::uint64_t pilot = kDefaultPilot, std::uint64_t seed = 1, const SamplerOptions& opts = {});

inline double is_runs_required(const CanonicalForm& cf, double gamma0, const AccuracySpec& spec,
                               std::uint64_t pilot = kDefaultPilot, std::uint64_t seed = 1,
                               const SamplerOptions& opts = {}) {
    return plan_is_runs(cf, gamma0, spec, pilot, seed, opts).runs;
}

}  // namespace qftail
