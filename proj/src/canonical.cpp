#include "qftail/canonical.hpp"

#include "qftail/error.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qftail {

namespace {

double max_abs(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void check_square(const Eigen::MatrixXd& m, Eigen::Index n, const char* name) {
    if (m.rows() != n || m.cols() != n) {
        throw Error(Errc::DimensionMismatch,
                    fmt::format("{} is {}x{}, expected {}x{}", name, m.rows(), m.cols(), n, n));
    }
}

void check_symmetric(const Eigen::MatrixXd& m, const char* name) {
    const double asym = max_abs(m - m.transpose());
    if (asym > kSymmetryTol * max_abs(m)) {
        throw Error(Errc::NonSymmetric, fmt::format("{} is not symmetric (max |A - A^T| = {:.3g})", name, asym));
    }
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolve(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw Error(Errc::NoConvergence, "symmetric eigensolver did not converge");
    }
    return es;
}

// sigma_x eigenvalues must clear rank_tol relative to the largest one.
void check_positive_definite(const Eigen::VectorXd& w, double rank_tol, const char* name) {
    const double wmax = w.size() ? w.maxCoeff() : 0.0;
    const double wmin = w.size() ? w.minCoeff() : 0.0;
    if (!(wmax > 0.0) || wmin <= rank_tol * wmax) {
        throw Error(Errc::NotPositiveDefinite,
                    fmt::format("{} is not positive definite (min eigenvalue {:.6g})", name, wmin));
    }
}

}  // namespace

double CanonicalForm::mean() const {
    return (lambdas.array() * (1.0 + alphas.array().square())).sum();
}

void validate_problem(const QuadFormProblem& p, double rank_tol) {
    const Eigen::Index n = p.mu.size();
    if (n == 0) {
        throw Error(Errc::DimensionMismatch, "problem dimension is zero");
    }
    check_square(p.sigma_x, n, "sigma_x");
    check_square(p.sigma, n, "sigma");
    if (!p.mu.allFinite() || !p.sigma_x.allFinite() || !p.sigma.allFinite()) {
        throw Error(Errc::InvalidArgument, "problem contains non-finite entries");
    }
    check_symmetric(p.sigma_x, "sigma_x");
    check_symmetric(p.sigma, "sigma");

    check_positive_definite(eigensolve(symmetrized(p.sigma_x)).eigenvalues(), rank_tol, "sigma_x");

    const Eigen::VectorXd ws = eigensolve(symmetrized(p.sigma)).eigenvalues();
    const double scale = std::max(ws.cwiseAbs().maxCoeff(), max_abs(p.sigma));
    if (ws.minCoeff() < -kSymmetryTol * scale) {
        throw Error(Errc::NotPSD, fmt::format("sigma is not positive semi-definite (min eigenvalue {:.6g})",
                                              ws.minCoeff()));
    }
    if (!(p.gamma0 > 0.0) || !std::isfinite(p.gamma0)) {
        throw Error(Errc::NonPositiveThreshold, fmt::format("threshold must be positive, got {}", p.gamma0));
    }
}

SqrtPair symmetric_sqrt_pair(const Eigen::MatrixXd& m, double rank_tol) {
    const auto es = eigensolve(symmetrized(m));
    const Eigen::VectorXd& w = es.eigenvalues();
    check_positive_definite(w, rank_tol, "matrix");
    const Eigen::MatrixXd& v = es.eigenvectors();
    const Eigen::VectorXd root = w.cwiseSqrt();
    SqrtPair out;
    out.sqrt = v * root.asDiagonal() * v.transpose();
    out.inv_sqrt = v * root.cwiseInverse().asDiagonal() * v.transpose();
    out.sqrt = symmetrized(out.sqrt);
    out.inv_sqrt = symmetrized(out.inv_sqrt);
    return out;
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m, double rank_tol) {
    return symmetric_sqrt_pair(m, rank_tol).sqrt;
}

CanonicalForm reduce(const QuadFormProblem& p, double rank_tol) {
    validate_problem(p, rank_tol);
    const Eigen::Index n = p.mu.size();

    const SqrtPair root = symmetric_sqrt_pair(p.sigma_x, rank_tol);
    const Eigen::MatrixXd a = symmetrized(root.sqrt * symmetrized(p.sigma) * root.sqrt);
    const auto es = eigensolve(a);
    const Eigen::VectorXd& w = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();

    // alpha over all eigenvector columns; the retained subset is picked below.
    const Eigen::VectorXd alpha_all = v.transpose() * (root.inv_sqrt * p.mu);

    const double wmax = w.maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (wmax > 0.0 && w[j] > rank_tol * wmax) keep.push_back(j);
    }
    if (keep.empty()) {
        throw Error(Errc::DegenerateForm, "quadratic form has no positive eigenvalues");
    }
    std::stable_sort(keep.begin(), keep.end(), [&](Eigen::Index a_idx, Eigen::Index b_idx) {
        return w[a_idx] > w[b_idx];
    });

    CanonicalForm cf;
    cf.n_original = static_cast<std::size_t>(n);
    cf.dropped_mass = static_cast<std::size_t>(n) - keep.size();
    cf.lambdas.resize(static_cast<Eigen::Index>(keep.size()));
    cf.alphas.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        cf.lambdas[static_cast<Eigen::Index>(k)] = w[keep[k]];
        cf.alphas[static_cast<Eigen::Index>(k)] = alpha_all[keep[k]];
    }
    return cf;
}

CanonicalForm make_canonical(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& alphas) {
    if (lambdas.size() != alphas.size() || lambdas.size() == 0) {
        throw Error(Errc::DimensionMismatch, "lambdas and alphas must be non-empty and equally sized");
    }
    if (!lambdas.allFinite() || !alphas.allFinite() || lambdas.minCoeff() <= 0.0) {
        throw Error(Errc::InvalidArgument, "lambdas must be positive and finite, alphas finite");
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(lambdas.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return lambdas[a] > lambdas[b]; });
    CanonicalForm cf;
    cf.n_original = order.size();
    cf.lambdas.resize(lambdas.size());
    cf.alphas.resize(alphas.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        cf.lambdas[static_cast<Eigen::Index>(k)] = lambdas[order[k]];
        cf.alphas[static_cast<Eigen::Index>(k)] = alphas[order[k]];
    }
    return cf;
}

}  // namespace qftail
