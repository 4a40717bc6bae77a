#include "oracles.hpp"

#include "qftail/error.hpp"
#include "qftail/planner.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace qftail {
namespace {

TEST(McRunsRequired, DirectFormula) {
    EXPECT_EQ(mc_runs_required(0.5), 1537.0);
    EXPECT_EQ(mc_runs_required(0.99), 16.0);
    EXPECT_EQ(mc_runs_required(1.0 - 1e-12), 1.0);
    // p from the N = 10, -20 dB point.
    const double m = mc_runs_required(1.9646e-12);
    EXPECT_NEAR(m / 7.8e14, 1.0, 0.01);
}

TEST(McRunsRequired, DegenerateProbability) {
    for (double p : {0.0, 1.0, -0.1}) {
        try {
            mc_runs_required(p);
            FAIL() << p;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::DegenerateProbability);
        }
    }
    EXPECT_THROW(mc_runs_required(0.5, {0.0, 1.96}), Error);
    EXPECT_THROW(mc_runs_required(0.5, {0.05, -1.0}), Error);
}

TEST(IsRunsRequired, FromEstimate) {
    EstimateResult e;
    e.estimate = 1e-6;
    e.variance = 4e-12;  // relative variance 4
    EXPECT_EQ(is_runs_from_estimate(e), std::ceil(std::pow(1.96 / 0.05, 2) * 4.0));
    e.variance = 0.0;
    EXPECT_EQ(is_runs_from_estimate(e), 1.0);
    e.estimate = 0.0;
    try {
        is_runs_from_estimate(e);
        FAIL();
    } catch (const Error& err) {
        EXPECT_EQ(err.code(), Errc::ZeroEstimate);
    }
}

TEST(IsRunsRequired, ToeplitzTenAtMinusTwentyDb) {
    const CanonicalForm cf = reduce(testing::toeplitz_problem(10, 0.4, 0.8, 1.0, 1.0));
    const double runs = is_runs_required(cf, testing::db(-20.0), {}, 10000, 5);
    EXPECT_GT(runs, 3.0738e3 / 2.0);
    EXPECT_LT(runs, 3.0738e3 * 2.0);
}

TEST(IsRunsRequired, FlatAcrossDeepThresholds) {
    const CanonicalForm cf = reduce(testing::toeplitz_problem(20, 0.4, 0.8, 1.0, 1.0));
    double lo = 1e300;
    double hi = 0.0;
    for (double db : {-20.0, -15.0, -10.0, -5.0, 0.0}) {
        const double runs = is_runs_required(cf, testing::db(db), {}, 10000, 6);
        lo = std::min(lo, runs);
        hi = std::max(hi, runs);
    }
    EXPECT_LE(hi / lo, 10.0);
}

TEST(IsRunsRequired, SingleTermFloor) {
    const CanonicalForm cf = make_canonical(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1));
    const IsPlan plan = plan_is_runs(cf, 0.3, {}, 2000, 1);
    EXPECT_GE(plan.runs, 1.0);
    EXPECT_TRUE(std::isfinite(plan.runs));
    EXPECT_EQ(plan.pilot.samples, 2000u);
    EXPECT_THROW(plan_is_runs(cf, 0.3, {}, 999, 1), Error);
}

}  // namespace
}  // namespace qftail
