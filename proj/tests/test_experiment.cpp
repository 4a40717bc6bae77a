#include "oracles.hpp"

#include "qftail/error.hpp"
#include "qftail/experiment.hpp"
#include "qftail/problem_io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace qftail {
namespace {

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return Errc::InvalidArgument;
}

TEST(DbToLinear, ExactAnchors) {
    EXPECT_EQ(db_to_linear(0.0), 1.0);
    EXPECT_EQ(db_to_linear(10.0), 10.0);
    EXPECT_NEAR(db_to_linear(-20.0), 0.01, 1e-17);
    EXPECT_NEAR(db_to_linear(5.0), std::sqrt(10.0), 1e-15);
}

TEST(Csv, HeaderAndRowFormat) {
    SweepRecord r;
    r.method = "is";
    r.n = 10;
    r.gamma_db = -20;
    r.value = 1.9646e-12;
    r.rel_error = 0.0125;
    r.seconds = 0;
    std::ostringstream out;
    write_csv(out, {r});
    EXPECT_EQ(out.str(), "method,n,gamma_db,value,rel_error,runs,seconds,reliable\n"
                         "is,10,-20,1.9645999999999999e-12,0.012500000000000001,,0,true\n");
}

TEST(Csv, NonFiniteAndOptionalCells) {
    SweepRecord r;
    r.method = "imhof";
    r.n = 60;
    r.gamma_db = 5;
    r.value = std::nan("");
    r.runs = 1537;
    r.reliable = false;
    EXPECT_EQ(to_csv_row(r), "imhof,60,5,nan,,1537,0,false");
    EXPECT_EQ(format_double(-INFINITY), "-inf");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(Config, ParsesKnownFields) {
    const ExperimentConfig cfg = config_from_json(R"({
        "n_values": [5, 7], "gamma_db": [-3.5], "methods": ["spa", "imhof"],
        "seed": 42, "samples_is": 500, "timing": false, "xi": 0.1, "rho": 0.5, "mu_value": 2
    })");
    EXPECT_EQ(cfg.n_values, (std::vector<long>{5, 7}));
    EXPECT_EQ(cfg.gamma_db, (std::vector<double>{-3.5}));
    EXPECT_EQ(cfg.methods, (std::vector<std::string>{"spa", "imhof"}));
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.samples_is, 500u);
    EXPECT_FALSE(cfg.timing);
    EXPECT_EQ(cfg.xi, 0.1);
    EXPECT_EQ(cfg.mu_value, 2.0);
    EXPECT_EQ(cfg.samples_mc, ExperimentConfig{}.samples_mc);
    EXPECT_NO_THROW(validate(cfg));
}

TEST(Config, Errors) {
    EXPECT_EQ(code_of([] { config_from_json(R"({"bogus": 1})"); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { config_from_json(R"({"seed": "x"})"); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { config_from_json("[1, 2"); }), Errc::ParseError);
    EXPECT_EQ(code_of([] { config_from_json("[1, 2]"); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { validate(config_from_json(R"({"gamma_db": []})")); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { validate(config_from_json(R"({"methods": ["magic"]})")); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { validate(config_from_json(R"({"n_values": [0]})")); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { validate(config_from_json(R"({"family": "file"})")); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { validate(config_from_json(R"({"xi": 1.0})")); }), Errc::ConfigError);
    EXPECT_EQ(code_of([] { validate(config_from_json(R"({"pilot": 10})")); }), Errc::ConfigError);
}

TEST(ProblemIo, RoundTrip) {
    const QuadFormProblem p = testing::toeplitz_problem(4, 0.4, 0.8, 1.0, 2.0);
    std::stringstream ss;
    write_problem(ss, p);
    const QuadFormProblem q = read_problem(ss, 2.0);
    EXPECT_EQ(q.sigma_x, p.sigma_x);
    EXPECT_EQ(q.sigma, p.sigma);
    EXPECT_EQ(q.mu, p.mu);
    EXPECT_EQ(q.gamma0, 2.0);
}

TEST(ProblemIo, Malformed) {
    for (const char* text : {"", "2\n1 0\n0 1\n1 0\n0 1\n", "2\n1 0\n0 x\n1 0\n0 1\n0 0\n", "-1\n",
                             "1\n1\n1\n0\n7\n", "2\n1 0 0\n0 1\n1 0\n0 1\n0 0\n"}) {
        std::istringstream in(text);
        EXPECT_EQ(code_of([&] { read_problem(in, 1.0); }), Errc::ParseError) << text;
    }
    std::istringstream ok("\n1\n\n2\n3\n0.5\n");
    const QuadFormProblem p = read_problem(ok, 1.0);
    EXPECT_EQ(p.sigma_x(0, 0), 2.0);
    EXPECT_EQ(p.mu[0], 0.5);
}

ExperimentConfig small_sweep() {
    ExperimentConfig cfg;
    cfg.n_values = {4, 6};
    cfg.gamma_db = {-10, 0};
    cfg.methods = {"is", "mc", "bounds", "spa", "imhof"};
    cfg.samples_is = 2000;
    cfg.samples_mc = 20000;
    cfg.timing = false;
    return cfg;
}

TEST(Sweep, DeterministicAcrossWorkerCounts) {
    ExperimentConfig a = small_sweep();
    a.workers = 1;
    ExperimentConfig b = small_sweep();
    b.workers = 5;
    std::ostringstream sa, sb;
    write_csv(sa, run_sweep(a));
    write_csv(sb, run_sweep(b));
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Sweep, RowsPerCell) {
    const auto rows = run_sweep(small_sweep());
    EXPECT_EQ(rows.size(), 2u * 2u * 5u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.seconds, 0.0);
        EXPECT_TRUE(std::isfinite(r.value)) << r.method;
        if (r.method == "is") {
            EXPECT_TRUE(r.rel_error.has_value());
        }
    }
}

TEST(Sweep, FileFamily) {
    const QuadFormProblem p = testing::toeplitz_problem(3, 0.4, 0.8, 1.0, 1.0);
    const auto path = std::filesystem::temp_directory_path() / "qftail_test_problem.txt";
    {
        std::ofstream out(path);
        write_problem(out, p);
    }
    ExperimentConfig cfg = small_sweep();
    cfg.family = "file";
    cfg.problem_file = path.string();
    cfg.methods = {"spa"};
    const auto rows = run_sweep(cfg);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].n, 3);
    std::filesystem::remove(path);
}

TEST(Plan, McAndIsRows) {
    ExperimentConfig cfg;
    cfg.n_values = {10};
    cfg.gamma_db = {-20};
    cfg.pilot = 10000;
    cfg.timing = false;
    const auto rows = run_plan(cfg);
    ASSERT_EQ(rows.size(), 2u);
    const auto& mc = rows[0].method == "mc" ? rows[0] : rows[1];
    const auto& is = rows[0].method == "is" ? rows[0] : rows[1];
    ASSERT_TRUE(mc.runs && is.runs);
    EXPECT_GT(*mc.runs, 1e14);
    EXPECT_LT(*is.runs, 1e4);
    EXPECT_EQ(mc.value, is.value);
}

TEST(Compare, ReferenceRowsAndTiming) {
    ExperimentConfig cfg;
    cfg.n_values = {10};
    cfg.gamma_db = {5};
    cfg.methods = {"spa", "imhof"};
    cfg.repetitions = 2;
    cfg.reference_data = default_reference_data_path().string();
    const auto rows = run_compare(cfg);
    bool m200 = false, m500 = false;
    for (const auto& r : rows) {
        if (r.method == "reference_m200") m200 = true;
        if (r.method == "reference_m500") m500 = true;
        if (r.method == "spa" || r.method == "imhof") EXPECT_GT(r.seconds, 0.0);
    }
    EXPECT_TRUE(m200 && m500);
    std::ostringstream table;
    write_timing_table(table, rows);
    EXPECT_NE(table.str().find("imhof"), std::string::npos);
    EXPECT_EQ(table.str().find("reference"), std::string::npos);
}

TEST(ReferenceData, LoadsBothFamilies) {
    const auto data = load_reference_data(default_reference_data_path());
    EXPECT_TRUE(data.count({0.4, 0.8, 1.0, 20}));
    EXPECT_TRUE(data.count({0.1, 0.5, 2.0, 100}));
    EXPECT_TRUE(data.at({0.4, 0.8, 1.0, 20}).count("m500"));
}

TEST(Estimate, JsonFields) {
    QuadFormProblem p{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2), 0.1};
    const std::string text = to_json(run_estimate(p, Method::ImportanceSampling, 10000, 1));
    const auto j = nlohmann::json::parse(text);
    for (const char* key : {"estimate", "variance", "rel_error", "ci_halfwidth", "samples", "seconds", "lower_bound",
                            "bre_constant"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_NEAR(j["estimate"].get<double>(), 1.0 - std::exp(-0.05), 3 * j["ci_halfwidth"].get<double>());
    EXPECT_EQ(j["samples"].get<int>(), 10000);
    EXPECT_EQ(j["method"], "is");
}

}  // namespace
}  // namespace qftail
