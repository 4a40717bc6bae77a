#include "qftail/sampler.hpp"

#include "qftail/error.hpp"
#include "qftail/running_stats.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

namespace qftail {

namespace {

enum class StreamTag : std::uint32_t { Naive = 1, Importance = 2, Direct = 3 };

// Independent substream per (seed, chunk, tag); identical regardless of which worker runs it.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t chunk, StreamTag tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

unsigned resolve_workers(unsigned requested, std::size_t chunks) {
    unsigned w = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(chunks, 1)));
}

// Runs fn(chunk_index, count) for every chunk and returns the per-chunk results in index order.
template <typename Result, typename Fn>
std::vector<Result> run_chunked(std::uint64_t total, unsigned workers, Fn fn) {
    const std::size_t chunks = static_cast<std::size_t>((total + kChunkSize - 1) / kChunkSize);
    std::vector<Result> out(chunks);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto work = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks || failed.load()) return;
            const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunkSize;
            const std::uint64_t count = std::min<std::uint64_t>(kChunkSize, total - begin);
            try {
                out[c] = fn(c, count);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };

    const unsigned n_workers = resolve_workers(workers, chunks);
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

void finalize(EstimateResult& r, double confidence_c) {
    r.ci_halfwidth = confidence_c * std::sqrt(r.variance / static_cast<double>(r.samples));
    if (r.estimate > 0.0) {
        r.rel_error = r.ci_halfwidth / r.estimate;
    } else {
        r.rel_error.reset();
    }
}

EstimateResult bernoulli_result(std::uint64_t hits, std::uint64_t m, double confidence_c) {
    EstimateResult r;
    r.method = Method::NaiveMc;
    r.samples = m;
    r.accepted = hits;
    const double p = static_cast<double>(hits) / static_cast<double>(m);
    r.estimate = p;
    r.variance = m > 1 ? p * (1.0 - p) * static_cast<double>(m) / static_cast<double>(m - 1) : 0.0;
    finalize(r, confidence_c);
    return r;
}

void check_threshold(double gamma0) {
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
        throw Error(Errc::NonPositiveThreshold, fmt::format("threshold must be positive, got {}", gamma0));
    }
}

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string_view to_string(Method m) noexcept {
    return m == Method::NaiveMc ? "mc" : "is";
}

BiasedDensitySpec make_biased_spec(const CanonicalForm& cf, double gamma0) {
    check_threshold(gamma0);
    const double d = static_cast<double>(cf.d());
    if (cf.d() == 0) throw Error(Errc::DegenerateForm, "canonical form is empty");
    BiasedDensitySpec spec;
    spec.means = -cf.alphas;
    spec.scales = (gamma0 / (d * cf.lambdas.array())).sqrt().matrix();
    return spec;
}

double log_likelihood_cap(const CanonicalForm& cf, double gamma0) {
    const double d = static_cast<double>(cf.d());
    return 0.5 * d * std::log(gamma0 / d) - 0.5 * cf.lambdas.array().log().sum() + 0.5 * d;
}

EstimateResult naive_mc(const CanonicalForm& cf, double gamma0, std::uint64_t m, std::uint64_t seed,
                        const SamplerOptions& opts) {
    check_threshold(gamma0);
    if (m < 1) throw Error(Errc::InvalidArgument, "naive MC needs at least one sample");
    const auto start = Clock::now();
    const Eigen::Index d = cf.lambdas.size();

    const auto hits = run_chunked<std::uint64_t>(m, opts.workers, [&](std::size_t chunk, std::uint64_t count) {
        auto rng = substream(seed, chunk, StreamTag::Naive);
        std::normal_distribution<double> normal;
        std::uint64_t h = 0;
        for (std::uint64_t j = 0; j < count; ++j) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) {
                const double y = normal(rng) + cf.alphas[i];
                s += cf.lambdas[i] * y * y;
            }
            h += (s <= gamma0);
        }
        return h;
    });

    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    EstimateResult r = bernoulli_result(total, m, opts.confidence_c);
    r.seconds = elapsed(start);
    return r;
}

EstimateResult importance_sampling(const CanonicalForm& cf, double gamma0, std::uint64_t m_star,
                                   std::uint64_t seed, const SamplerOptions& opts) {
    if (m_star < 2) throw Error(Errc::InvalidArgument, "importance sampling needs at least two samples");
    const auto start = Clock::now();
    const BiasedDensitySpec spec = make_biased_spec(cf, gamma0);
    const Eigen::Index d = cf.lambdas.size();
    const double log_scale_sum = spec.scales.array().log().sum();

    struct Chunk {
        RunningStats stats;
        std::uint64_t accepted = 0;
        double max_log_weight = -std::numeric_limits<double>::infinity();
    };

    const auto chunks = run_chunked<Chunk>(m_star, opts.workers, [&](std::size_t chunk, std::uint64_t count) {
        auto rng = substream(seed, chunk, StreamTag::Importance);
        std::normal_distribution<double> normal;
        Chunk c;
        for (std::uint64_t j = 0; j < count; ++j) {
            double s = 0.0;
            double quad = 0.0;
            for (Eigen::Index i = 0; i < d; ++i) {
                const double z = spec.means[i] + spec.scales[i] * normal(rng);
                const double y = z + cf.alphas[i];
                const double u = y / spec.scales[i];
                s += cf.lambdas[i] * y * y;
                quad += u * u - z * z;
            }
            if (s <= gamma0) {
                const double log_w = log_scale_sum + 0.5 * quad;
                const double w = std::exp(log_w);
                if (!std::isfinite(w)) {
                    throw Error(Errc::DegenerateWeight, fmt::format("non-finite likelihood ratio (log = {})", log_w));
                }
                ++c.accepted;
                c.max_log_weight = std::max(c.max_log_weight, log_w);
                c.stats.push(w);
            } else {
                c.stats.push(0.0);
            }
        }
        return c;
    });

    RunningStats stats;
    EstimateResult r;
    r.method = Method::ImportanceSampling;
    r.max_log_weight = -std::numeric_limits<double>::infinity();
    for (const auto& c : chunks) {
        stats.merge(c.stats);
        r.accepted += c.accepted;
        r.max_log_weight = std::max(r.max_log_weight, c.max_log_weight);
    }
    r.samples = m_star;
    r.estimate = std::clamp(stats.mean(), 0.0, 1.0);
    r.variance = stats.variance();
    finalize(r, opts.confidence_c);
    r.seconds = elapsed(start);
    return r;
}

EstimateResult naive_mc_direct(const QuadFormProblem& p, std::uint64_t m, std::uint64_t seed,
                               const SamplerOptions& opts) {
    validate_problem(p);
    if (m < 1) throw Error(Errc::InvalidArgument, "naive MC needs at least one sample");
    const auto start = Clock::now();
    const Eigen::MatrixXd root = symmetric_sqrt(p.sigma_x);
    const Eigen::MatrixXd sigma = 0.5 * (p.sigma + p.sigma.transpose());
    const Eigen::Index n = p.mu.size();

    const auto hits = run_chunked<std::uint64_t>(m, opts.workers, [&](std::size_t chunk, std::uint64_t count) {
        auto rng = substream(seed, chunk, StreamTag::Direct);
        std::normal_distribution<double> normal;
        Eigen::VectorXd z(n);
        Eigen::VectorXd x(n);
        std::uint64_t h = 0;
        for (std::uint64_t j = 0; j < count; ++j) {
            for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
            x.noalias() = p.mu + root * z;
            h += (x.dot(sigma * x) <= p.gamma0);
        }
        return h;
    });

    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    EstimateResult r = bernoulli_result(total, m, opts.confidence_c);
    r.seconds = elapsed(start);
    return r;
}

}  // namespace qftail
