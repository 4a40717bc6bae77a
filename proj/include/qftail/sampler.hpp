#pragma once

#include "qftail/canonical.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace qftail {

enum class Method { NaiveMc, ImportanceSampling };

std::string_view to_string(Method m) noexcept;

/// Proposal for the importance sampler: Z_i ~ N(means[i], scales[i]^2).
struct BiasedDensitySpec {
    Eigen::VectorXd means;   // -alpha_i
    Eigen::VectorXd scales;  // sqrt(gamma0 / (d * lambda_i))
};

struct EstimateResult {
    double estimate = 0.0;
    double variance = 0.0;              // per-sample variance of the summand
    std::optional<double> rel_error;    // empty when estimate == 0
    double ci_halfwidth = 0.0;
    std::uint64_t samples = 0;
    double seconds = 0.0;
    Method method = Method::NaiveMc;
    std::uint64_t accepted = 0;         // samples with S_d <= gamma0
    /// Largest log likelihood ratio over accepted samples (IS only; -inf if none).
    double max_log_weight = 0.0;
};

struct SamplerOptions {
    /// Worker threads; 0 selects std::thread::hardware_concurrency(). Results do not
    /// depend on this value.
    unsigned workers = 0;
    double confidence_c = 1.96;
};

/// Samples per independently seeded substream.
inline constexpr std::size_t kChunkSize = std::size_t{1} << 14;

BiasedDensitySpec make_biased_spec(const CanonicalForm& cf, double gamma0);

/// Log of the likelihood-ratio cap (gamma0/d)^{d/2} prod lambda_i^{-1/2} e^{d/2}
/// that holds on the event S_d <= gamma0.
double log_likelihood_cap(const CanonicalForm& cf, double gamma0);

EstimateResult naive_mc(const CanonicalForm& cf, double gamma0, std::uint64_t m, std::uint64_t seed,
                        const SamplerOptions& opts = {});

EstimateResult importance_sampling(const CanonicalForm& cf, double gamma0, std::uint64_t m_star,
                                   std::uint64_t seed, const SamplerOptions& opts = {});

/// Naive MC directly on X^T Sigma X with X = mu + sigma_x^{1/2} Z. Used as an
/// independent check of the reduction.
EstimateResult naive_mc_direct(const QuadFormProblem& p, std::uint64_t m, std::uint64_t seed,
                               const SamplerOptions& opts = {});

}  // namespace qftail
