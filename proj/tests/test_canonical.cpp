#include "oracles.hpp"

#include "qftail/canonical.hpp"
#include "qftail/error.hpp"
#include "qftail/sampler.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

namespace qftail {
namespace {

using testing::random_psd;
using testing::random_spd;

Errc error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected qftail::Error";
    return Errc::InvalidArgument;
}

QuadFormProblem identity_problem(Eigen::Index n, double gamma0) {
    return {Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(n, n), gamma0};
}

TEST(ValidateProblem, IdentityCaseIsValid) {
    EXPECT_NO_THROW(validate_problem(identity_problem(2, 1.0)));
}

TEST(ValidateProblem, RejectsIndefiniteCovariance) {
    auto p = identity_problem(2, 1.0);
    p.sigma_x = Eigen::Vector2d(1.0, -0.1).asDiagonal();
    EXPECT_EQ(error_code([&] { validate_problem(p); }), Errc::NotPositiveDefinite);
}

TEST(ValidateProblem, AcceptsSemiDefiniteForm) {
    auto p = identity_problem(2, 1.0);
    p.sigma = Eigen::Vector2d(1.0, 0.0).asDiagonal();
    EXPECT_NO_THROW(validate_problem(p));
}

TEST(ValidateProblem, ErrorPaths) {
    auto asym = identity_problem(2, 1.0);
    asym.sigma(0, 1) = 0.3;
    EXPECT_EQ(error_code([&] { validate_problem(asym); }), Errc::NonSymmetric);

    auto indefinite = identity_problem(2, 1.0);
    indefinite.sigma = Eigen::Vector2d(1.0, -0.5).asDiagonal();
    EXPECT_EQ(error_code([&] { validate_problem(indefinite); }), Errc::NotPSD);

    EXPECT_EQ(error_code([] { validate_problem(identity_problem(2, 0.0)); }), Errc::NonPositiveThreshold);
    EXPECT_EQ(error_code([] { validate_problem(identity_problem(2, -1.0)); }), Errc::NonPositiveThreshold);

    auto mismatch = identity_problem(2, 1.0);
    mismatch.mu = Eigen::VectorXd::Zero(3);
    EXPECT_EQ(error_code([&] { validate_problem(mismatch); }), Errc::DimensionMismatch);
}

TEST(ValidateProblem, SymmetryToleranceIsRelative) {
    auto p = identity_problem(2, 1.0);
    p.sigma(0, 1) = 1e-12;  // below 1e-10 * max|A|
    EXPECT_NO_THROW(validate_problem(p));
}

TEST(SymmetricSqrt, IdentityAndDiagonal) {
    EXPECT_TRUE(symmetric_sqrt(Eigen::MatrixXd::Identity(3, 3)).isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-14));
    const Eigen::MatrixXd d = Eigen::Vector2d(4.0, 9.0).asDiagonal();
    const Eigen::MatrixXd expected = Eigen::Vector2d(2.0, 3.0).asDiagonal();
    EXPECT_LT((symmetric_sqrt(d) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SymmetricSqrt, ToeplitzReconstructs) {
    Eigen::Matrix2d m;
    m << 1.0, 0.8, 0.8, 1.0;
    const Eigen::MatrixXd r = symmetric_sqrt(m);
    EXPECT_LT((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((r * r - m).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SymmetricSqrt, RandomResidualBound) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd m = random_spd(2 + trial % 9, rng);
        const auto pair = symmetric_sqrt_pair(m);
        const double scale = m.cwiseAbs().rowwise().sum().maxCoeff();
        EXPECT_LE((pair.sqrt * pair.sqrt - m).cwiseAbs().rowwise().sum().maxCoeff(), 1e-10 * scale);
        EXPECT_LT((pair.sqrt * pair.inv_sqrt - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff(),
                  1e-9);
    }
}

TEST(SymmetricSqrt, RejectsNonPositiveDefinite) {
    const Eigen::MatrixXd m = Eigen::Vector2d(1.0, 0.0).asDiagonal();
    EXPECT_EQ(error_code([&] { symmetric_sqrt(m); }), Errc::NotPositiveDefinite);
}

TEST(Reduce, CentralChiSquare) {
    const CanonicalForm cf = reduce(identity_problem(5, 1.0));
    EXPECT_EQ(cf.d(), 5u);
    EXPECT_EQ(cf.dropped_mass, 0u);
    EXPECT_EQ(cf.n_original, 5u);
    for (Eigen::Index i = 0; i < 5; ++i) {
        EXPECT_NEAR(cf.lambdas[i], 1.0, 1e-14);
        EXPECT_EQ(cf.alphas[i], 0.0);
    }
}

TEST(Reduce, DiagonalFormSortsDescending) {
    QuadFormProblem p;
    p.mu = Eigen::VectorXd::Ones(4);
    p.sigma_x = Eigen::MatrixXd::Identity(4, 4);
    p.sigma = Eigen::Vector4d(0.5, 3.0, 1.0, 2.0).asDiagonal();
    p.gamma0 = 1.0;
    const CanonicalForm cf = reduce(p);
    const Eigen::Vector4d expected(3.0, 2.0, 1.0, 0.5);
    EXPECT_LT((cf.lambdas - expected).cwiseAbs().maxCoeff(), 1e-14);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(cf.alphas[i]), 1.0, 1e-14);
}

TEST(Reduce, RankDeficientFormDropsZeroEigenvalues) {
    std::mt19937_64 rng(5);
    QuadFormProblem p;
    p.mu = Eigen::VectorXd::Constant(6, 0.7);
    p.sigma_x = random_spd(6, rng);
    p.sigma = random_psd(6, 3, rng);
    p.gamma0 = 1.0;
    const CanonicalForm cf = reduce(p);
    EXPECT_EQ(cf.d(), 3u);
    EXPECT_EQ(cf.dropped_mass, 3u);
    EXPECT_EQ(cf.d() + cf.dropped_mass, cf.n_original);
}

TEST(Reduce, TraceIdentity) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::Index n = 1 + trial % 8;
        QuadFormProblem p;
        p.mu = Eigen::VectorXd::Random(n);
        p.sigma_x = random_spd(n, rng);
        p.sigma = trial % 3 == 0 ? random_psd(n, std::max<Eigen::Index>(1, n / 2), rng) : random_spd(n, rng);
        p.gamma0 = 1.0;
        const CanonicalForm cf = reduce(p);
        const double trace = (p.sigma_x * p.sigma).trace();
        EXPECT_NEAR(cf.lambdas.sum(), trace, 1e-8 * std::abs(trace));
        for (Eigen::Index i = 1; i < cf.lambdas.size(); ++i) EXPECT_GE(cf.lambdas[i - 1], cf.lambdas[i]);
        EXPECT_GT(cf.lambdas.minCoeff(), kDefaultRankTol * cf.lambdas.maxCoeff());
    }
}

TEST(Reduce, MeanIsPreserved) {
    // E[X^T Sigma X] = tr(Sigma Sigma_X) + mu^T Sigma mu must equal sum lambda_i (1 + alpha_i^2).
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 2 + trial % 6;
        QuadFormProblem p{Eigen::VectorXd::Random(n), random_spd(n, rng), random_spd(n, rng), 1.0};
        const CanonicalForm cf = reduce(p);
        const double expected = (p.sigma * p.sigma_x).trace() + p.mu.dot(p.sigma * p.mu);
        EXPECT_NEAR(cf.mean(), expected, 1e-10 * expected);
    }
}

TEST(Reduce, BitwiseReproducible) {
    std::mt19937_64 rng(3);
    QuadFormProblem p{Eigen::VectorXd::Random(7), random_spd(7, rng), random_spd(7, rng), 1.0};
    const CanonicalForm a = reduce(p);
    const CanonicalForm b = reduce(p);
    EXPECT_TRUE((a.lambdas.array() == b.lambdas.array()).all());
    EXPECT_TRUE((a.alphas.array() == b.alphas.array()).all());
}

// Empirical CDFs of X^T Sigma X (sampled from X) and of S_d (sampled from the canonical
// form) agree within 3 joint binomial standard errors.
void expect_same_distribution(const QuadFormProblem& p, std::uint64_t seed) {
    const CanonicalForm cf = reduce(p);
    // Thresholds at the quantiles 0.05 .. 0.95 of a preliminary canonical sample.
    const double mean = cf.mean();
    for (double frac : {0.2, 0.5, 0.8, 1.0, 1.5}) {
        QuadFormProblem q = p;
        q.gamma0 = frac * mean;
        const std::uint64_t m = 1000000;
        const EstimateResult direct = naive_mc_direct(q, m, seed);
        const EstimateResult canon = naive_mc(cf, q.gamma0, m, seed + 1);
        const double joint_se = std::sqrt(direct.variance / m + canon.variance / m);
        EXPECT_LE(std::abs(direct.estimate - canon.estimate), 3.0 * joint_se + 1e-12)
            << "threshold " << q.gamma0 << " direct " << direct.estimate << " canonical " << canon.estimate;
    }
}

TEST(Reduce, DistributionEquivalenceRandomProblems) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::Index n = 2 + trial;  // 2..6
        QuadFormProblem p;
        p.mu = Eigen::VectorXd(n);
        for (Eigen::Index i = 0; i < n; ++i) p.mu[i] = normal(rng);
        p.sigma_x = random_spd(n, rng);
        p.sigma = trial == 3 ? random_psd(n, n - 2, rng) : random_spd(n, rng);
        expect_same_distribution(p, 100 + trial);
    }
}

TEST(Reduce, PermutationInvariance) {
    std::mt19937_64 rng(99);
    const Eigen::Index n = 5;
    QuadFormProblem p{Eigen::VectorXd::LinSpaced(n, -1.0, 2.0), random_spd(n, rng), random_spd(n, rng), 1.0};
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
    perm.indices() << 3, 0, 4, 1, 2;
    QuadFormProblem q = p;
    q.mu = perm * p.mu;
    q.sigma_x = perm * p.sigma_x * perm.transpose();
    q.sigma = perm * p.sigma * perm.transpose();

    const CanonicalForm a = reduce(p);
    const CanonicalForm b = reduce(q);
    EXPECT_LT((a.lambdas - b.lambdas).cwiseAbs().maxCoeff(), 1e-10 * a.lambdas.maxCoeff());
    p.gamma0 = q.gamma0 = a.mean();
    const EstimateResult ea = naive_mc(a, p.gamma0, 1000000, 5);
    const EstimateResult eb = naive_mc(b, q.gamma0, 1000000, 6);
    EXPECT_LE(std::abs(ea.estimate - eb.estimate), 3.0 * std::sqrt((ea.variance + eb.variance) / 1e6));
}

TEST(Reduce, ToeplitzFamilyMatchesDirectSampling) {
    // mu_i = 1, [Sigma]_ij = 0.4^|i-j|, [Sigma_X]_ij = 0.8^|i-j|, N = 10, 10 dB.
    const QuadFormProblem p = testing::toeplitz_problem(10, 0.4, 0.8, 1.0, 10.0);
    const CanonicalForm cf = reduce(p);
    const std::uint64_t m = 2000000;
    const EstimateResult direct = naive_mc_direct(p, m, 41);
    const EstimateResult canon = naive_mc(cf, p.gamma0, m, 42);
    const double joint_se = std::sqrt((direct.variance + canon.variance) / m);
    EXPECT_LE(std::abs(direct.estimate - canon.estimate), 3.0 * joint_se);
    EXPECT_NEAR(canon.estimate, 0.1925, 3.0 * std::sqrt(canon.variance / m) + 5e-5);
}

TEST(MakeCanonical, SortsAndValidates) {
    const CanonicalForm cf = make_canonical(Eigen::Vector3d(1.0, 3.0, 2.0), Eigen::Vector3d(0.1, 0.3, 0.2));
    EXPECT_EQ(cf.lambdas, Eigen::Vector3d(3.0, 2.0, 1.0));
    EXPECT_EQ(cf.alphas, Eigen::Vector3d(0.3, 0.2, 0.1));
    EXPECT_EQ(error_code([] { make_canonical(Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d::Zero()); }),
              Errc::InvalidArgument);
}

}  // namespace
}  // namespace qftail
