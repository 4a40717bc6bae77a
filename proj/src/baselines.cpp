#include "qftail/baselines.hpp"

#include "qftail/error.hpp"
#include "qftail/special.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace qftail {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

class ImhofIntegrand {
public:
    ImhofIntegrand(const CanonicalForm& cf, double x) : cf_(cf), x_(x) {
        limit_at_zero_ = 0.5 * cf.mean() - 0.5 * x;
    }

    double operator()(double u) const {
        if (u == 0.0) return limit_at_zero_;
        double theta = -0.5 * x_ * u;
        double log_rho = 0.0;
        for (Eigen::Index i = 0; i < cf_.lambdas.size(); ++i) {
            const double lu = cf_.lambdas[i] * u;
            const double a2 = cf_.alphas[i] * cf_.alphas[i];
            const double q = 1.0 + lu * lu;
            theta += 0.5 * (std::atan(lu) + a2 * lu / q);
            log_rho += 0.25 * std::log1p(lu * lu) + 0.5 * a2 * lu * lu / q;
        }
        return std::sin(theta) * std::exp(-std::log(u) - log_rho);
    }

    // Imhof's bound on the CDF error from truncating the integral at u.
    double truncation_bound(double u) const {
        const double k = 0.5 * static_cast<double>(cf_.d());
        double log_den = std::log(std::numbers::pi * k) + k * std::log(u);
        for (Eigen::Index i = 0; i < cf_.lambdas.size(); ++i) {
            const double lu = cf_.lambdas[i] * u;
            log_den += 0.5 * std::log(cf_.lambdas[i]);
            log_den += 0.5 * cf_.alphas[i] * cf_.alphas[i] * lu * lu / (1.0 + lu * lu);
        }
        return std::exp(-log_den);
    }

private:
    const CanonicalForm& cf_;
    double x_;
    double limit_at_zero_;
};

struct Quadrature {
    double value = 0.0;
    double error = 0.0;
};

class AdaptiveKronrod {
public:
    AdaptiveKronrod(const ImhofIntegrand& f, std::size_t max_evals) : f_(f), max_evals_(max_evals) {}

    Quadrature integrate(double a, double b, double tol) { return refine(a, b, tol, 0); }
    std::size_t evals() const { return evals_; }

private:
    Quadrature rule(double a, double b) {
        if (evals_ + 15 > max_evals_) {
            throw Error(Errc::QuadratureFailure, fmt::format("Imhof quadrature exceeded {} evaluations", max_evals_));
        }
        evals_ += 15;
        const double c = 0.5 * (a + b);
        const double h = 0.5 * (b - a);
        const double fc = f_(c);
        double kron = fc * kWgk[7];
        double gauss = fc * kWg[3];
        for (int j = 0; j < 7; ++j) {
            const double dx = h * kXgk[static_cast<std::size_t>(j)];
            const double s = f_(c - dx) + f_(c + dx);
            kron += kWgk[static_cast<std::size_t>(j)] * s;
            if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * s;
        }
        return {kron * h, std::abs((kron - gauss) * h)};
    }

    Quadrature refine(double a, double b, double tol, int depth) {
        const Quadrature whole = rule(a, b);
        if (whole.error <= tol || depth >= 40) return whole;
        const double m = 0.5 * (a + b);
        const Quadrature left = refine(a, m, 0.5 * tol, depth + 1);
        const Quadrature right = refine(m, b, 0.5 * tol, depth + 1);
        return {left.value + right.value, left.error + right.error};
    }

    const ImhofIntegrand& f_;
    std::size_t max_evals_;
    std::size_t evals_ = 0;
};

// Wynn's epsilon algorithm; returns the extrapolated limit of the partial sums.
double wynn_epsilon(const std::vector<double>& s) {
    std::vector<double> prev(s.size() + 1, 0.0);
    std::vector<double> cur(s.begin(), s.end());
    double best = s.back();
    for (std::size_t k = 1; cur.size() > 1; ++k) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
            const double diff = cur[j + 1] - cur[j];
            if (diff == 0.0) return cur[j + 1];
            next[j] = prev[j + 1] + 1.0 / diff;
        }
        prev = std::move(cur);
        cur = std::move(next);
        if (k % 2 == 0) best = cur.back();
    }
    return best;
}

}  // namespace

ImhofResult imhof(const CanonicalForm& cf, double gamma0, const ImhofConfig& cfg) {
    if (!(gamma0 > 0.0)) {
        throw Error(Errc::NonPositiveThreshold, fmt::format("threshold must be positive, got {}", gamma0));
    }
    if (!(cfg.abs_tol > 0.0) || cfg.max_evals < 100 || !(cfg.max_interval > 0.0)) {
        throw Error(Errc::InvalidArgument, "invalid Imhof configuration");
    }
    const ImhofIntegrand f(cf, gamma0);
    AdaptiveKronrod quad(f, cfg.max_evals);

    // Panels of half a period of sin(gamma0 u / 2), the asymptotic oscillation.
    const double width = 2.0 * std::numbers::pi / gamma0;
    const double integral_tol = cfg.abs_tol * std::numbers::pi;

    double sum = 0.0;
    double quad_error = 0.0;
    std::vector<double> partial;
    double previous_extrapolation = std::numeric_limits<double>::quiet_NaN();
    int stable_extrapolations = 0;

    ImhofResult r;
    for (std::size_t k = 0;; ++k) {
        const double a = static_cast<double>(k) * width;
        const double b = a + width;
        if (a >= cfg.max_interval) {
            throw Error(Errc::QuadratureFailure,
                        fmt::format("Imhof integral not converged at u = {:.3g}", cfg.max_interval));
        }
        const double kk = static_cast<double>(k + 1);
        const Quadrature panel = quad.integrate(a, b, 0.25 * integral_tol / (kk * kk));
        sum += panel.value;
        quad_error += panel.error;
        partial.push_back(sum);

        const double truncation = f.truncation_bound(b);
        if (truncation <= 0.5 * cfg.abs_tol) {
            r.raw = 0.5 - sum / std::numbers::pi;
            r.error_estimate = quad_error / std::numbers::pi + truncation;
            r.upper_limit = b;
            break;
        }
        // Slowly decaying alternating tail (small d): extrapolate the panel sums.
        if (partial.size() >= 8) {
            const std::size_t keep = std::min<std::size_t>(partial.size(), 31);
            const std::vector<double> tail(partial.end() - static_cast<std::ptrdiff_t>(keep), partial.end());
            const double extrapolated = wynn_epsilon(tail);
            const double change = std::abs(extrapolated - previous_extrapolation);
            if (change <= 0.1 * integral_tol) {
                ++stable_extrapolations;
            } else {
                stable_extrapolations = 0;
            }
            previous_extrapolation = extrapolated;
            if (stable_extrapolations >= 3) {
                r.raw = 0.5 - extrapolated / std::numbers::pi;
                r.error_estimate = (quad_error + 10.0 * change) / std::numbers::pi;
                r.upper_limit = b;
                break;
            }
        }
    }
    r.evals = quad.evals();
    if (r.error_estimate > cfg.abs_tol) {
        throw Error(Errc::QuadratureFailure,
                    fmt::format("Imhof error estimate {:.3g} exceeds tolerance {:.3g}", r.error_estimate, cfg.abs_tol));
    }
    r.value = std::clamp(r.raw, 0.0, 1.0);
    r.reliable = r.raw >= 10.0 * cfg.abs_tol;
    return r;
}

double Cgf::k0(double s) const {
    double k = 0.0;
    for (Eigen::Index i = 0; i < cf_.lambdas.size(); ++i) {
        const double l = cf_.lambdas[i];
        const double t = 1.0 - 2.0 * s * l;
        k += -0.5 * std::log(t) + s * l * cf_.alphas[i] * cf_.alphas[i] / t;
    }
    return k;
}

double Cgf::k1(double s) const {
    double k = 0.0;
    for (Eigen::Index i = 0; i < cf_.lambdas.size(); ++i) {
        const double l = cf_.lambdas[i];
        const double t = 1.0 - 2.0 * s * l;
        k += l / t + l * cf_.alphas[i] * cf_.alphas[i] / (t * t);
    }
    return k;
}

double Cgf::k2(double s) const {
    double k = 0.0;
    for (Eigen::Index i = 0; i < cf_.lambdas.size(); ++i) {
        const double l = cf_.lambdas[i];
        const double t = 1.0 - 2.0 * s * l;
        k += 2.0 * l * l / (t * t) + 4.0 * l * l * cf_.alphas[i] * cf_.alphas[i] / (t * t * t);
    }
    return k;
}

double Cgf::upper_limit() const {
    return 0.5 / cf_.lambdas.maxCoeff();
}

SpaResult spa(const CanonicalForm& cf, double gamma0, const SpaConfig& cfg) {
    if (!(gamma0 > 0.0)) {
        throw Error(Errc::NonPositiveThreshold, fmt::format("threshold must be positive, got {}", gamma0));
    }
    if (!(cfg.newton_tol > 0.0) || !(cfg.bracket_expansion > 1.0)) {
        throw Error(Errc::InvalidArgument, "invalid saddle-point configuration");
    }
    const Cgf cgf(cf);
    const double mean = cgf.k1(0.0);
    if (std::abs(gamma0 - mean) <= 1e-8 * mean) {
        throw Error(Errc::AtMeanSingularity,
                    fmt::format("threshold {} coincides with the mean {}; Lugannani-Rice is singular there", gamma0, mean));
    }

    // Bracket [lo, hi] with K'(lo) < gamma0 < K'(hi); K' is increasing.
    double lo = 0.0;
    double hi = 0.0;
    double s = 0.0;
    std::size_t iter = 0;
    if (gamma0 < mean) {
        lo = -static_cast<double>(cf.d()) / (2.0 * gamma0);
        while (cgf.k1(lo) >= gamma0) {
            hi = lo;
            lo *= cfg.bracket_expansion;
            if (++iter > cfg.max_iter) throw Error(Errc::NoConvergence, "could not bracket the saddle point");
        }
        s = 0.5 * (lo + hi);
    } else {
        hi = cgf.upper_limit();
        s = 0.5 * hi;
        lo = 0.0;
    }

    double residual = cgf.k1(s) - gamma0;
    for (; std::abs(residual) > cfg.newton_tol; ++iter) {
        if (iter >= cfg.max_iter) {
            throw Error(Errc::NoConvergence,
                        fmt::format("saddle point not found within {} iterations (residual {:.3g})", cfg.max_iter, residual));
        }
        if (residual > 0.0) {
            hi = s;
        } else {
            lo = s;
        }
        double next = s - residual / cgf.k2(s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == s) {
            throw Error(Errc::NoConvergence,
                        fmt::format("saddle-point iteration stalled at s = {} (residual {:.3g})", s, residual));
        }
        s = next;
        residual = cgf.k1(s) - gamma0;
    }

    const double k2 = cgf.k2(s);
    if (!(k2 > 0.0)) {
        throw Error(Errc::NoConvergence, fmt::format("K''(s) = {} is not positive at the saddle point", k2));
    }
    const double w = std::copysign(std::sqrt(std::max(0.0, 2.0 * (s * gamma0 - cgf.k0(s)))), s);
    const double v = s * std::sqrt(k2);

    SpaResult r;
    r.saddlepoint = s;
    r.residual = std::abs(residual);
    r.iterations = iter;
    r.value = std::clamp(special::normal_cdf(w) + special::normal_pdf(w) * (1.0 / w - 1.0 / v), 0.0, 1.0);
    return r;
}

}  // namespace qftail
