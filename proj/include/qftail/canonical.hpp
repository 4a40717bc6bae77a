#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace qftail {

/// P(X^T Sigma X <= gamma0) with X ~ N(mu, sigma_x).
struct QuadFormProblem {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma_x;
    Eigen::MatrixXd sigma;
    double gamma0 = 1.0;
};

/// S_d = sum_i lambdas[i] * (Z_i + alphas[i])^2 with Z_i iid N(0,1).
struct CanonicalForm {
    Eigen::VectorXd lambdas;  // descending, all > rank_tol * lambda_max
    Eigen::VectorXd alphas;
    std::size_t n_original = 0;
    std::size_t dropped_mass = 0;

    std::size_t d() const noexcept { return static_cast<std::size_t>(lambdas.size()); }
    /// E[S_d] = sum lambda_i (1 + alpha_i^2).
    double mean() const;
};

inline constexpr double kDefaultRankTol = 1e-12;
inline constexpr double kSymmetryTol = 1e-10;

/// Throws qftail::Error (NonSymmetric, NotPositiveDefinite, NotPSD,
/// NonPositiveThreshold, DimensionMismatch) on the first violated invariant.
void validate_problem(const QuadFormProblem& p, double rank_tol = kDefaultRankTol);

/// Symmetric square root R = V diag(sqrt(w)) V^T of a symmetric positive definite matrix.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m, double rank_tol = kDefaultRankTol);

struct SqrtPair {
    Eigen::MatrixXd sqrt;
    Eigen::MatrixXd inv_sqrt;
};

/// Both m^{1/2} and m^{-1/2} from one eigendecomposition.
SqrtPair symmetric_sqrt_pair(const Eigen::MatrixXd& m, double rank_tol = kDefaultRankTol);

/// Reduce a validated problem to the weighted non-central chi-square(1) sum.
///
/// With A = sigma_x^{1/2} sigma sigma_x^{1/2} = V diag(w) V^T, the retained
/// eigenvalues are the w_j above rank_tol * max(w), and alpha = V^T sigma_x^{-1/2} mu
/// restricted to the same columns. Output ordering is descending in lambda, ties
/// broken by eigensolver column index, so identical inputs give identical forms.
CanonicalForm reduce(const QuadFormProblem& p, double rank_tol = kDefaultRankTol);

/// Form built directly from (lambda, alpha); sorts descending and validates positivity.
CanonicalForm make_canonical(const Eigen::VectorXd& lambdas, const Eigen::VectorXd& alphas);

}  // namespace qftail
