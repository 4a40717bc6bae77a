// qftail: left-tail probabilities of Gaussian quadratic forms.
//
//   qftail sweep    --n 10,20,30 --gamma-db -20,-10,0,10 --methods is,mc,bounds
//   qftail plan     --n 10,20 --epsilon 0.05
//   qftail compare  --n 5,10,20,40 --gamma-db 5 --methods is,imhof,spa
//   qftail estimate --problem problem.txt --gamma-linear 0.1 --method is

#include "qftail/error.hpp"
#include "qftail/experiment.hpp"
#include "qftail/problem_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::vector<std::string> methods;
    std::optional<double> epsilon;
    std::optional<std::uint64_t> samples_is;
    std::optional<std::uint64_t> samples_mc;
    std::vector<double> gamma_db;
    std::vector<long> n_values;
    std::optional<double> xi;
    std::optional<double> rho;
    std::optional<double> mu;
    std::optional<unsigned> workers;
    std::optional<std::uint64_t> pilot;
    std::optional<std::string> reference_data;
    std::optional<std::string> problem;
    bool no_timing = false;
};

void add_experiment_flags(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    cmd.add_option("--seed", o.seed, "RNG seed");
    cmd.add_option("--out", o.out, "output CSV path (default: stdout)");
    cmd.add_option("--methods", o.methods, "subset of is,mc,imhof,spa,bounds")->delimiter(',');
    cmd.add_option("--epsilon", o.epsilon, "target relative error");
    cmd.add_option("--samples-is", o.samples_is, "importance-sampling runs M*");
    cmd.add_option("--samples-mc", o.samples_mc, "naive Monte Carlo runs M");
    cmd.add_option("--gamma-db", o.gamma_db, "thresholds in dB")->delimiter(',');
    cmd.add_option("--n", o.n_values, "dimensions")->delimiter(',');
    cmd.add_option("--xi", o.xi, "Toeplitz base of the form matrix");
    cmd.add_option("--rho", o.rho, "Toeplitz base of the covariance");
    cmd.add_option("--mu", o.mu, "common mean value");
    cmd.add_option("--workers", o.workers, "sampling threads (0 = all cores)");
    cmd.add_option("--pilot", o.pilot, "pilot size for IS planning");
    cmd.add_option("--reference-data", o.reference_data, "CSV of published series values");
    cmd.add_option("--problem", o.problem, "problem file (switches family to 'file')");
    cmd.add_flag("--no-timing", o.no_timing, "write 0 in the seconds column");
}

qftail::ExperimentConfig build_config(const Overrides& o, std::vector<std::string> default_methods) {
    qftail::ExperimentConfig cfg;
    if (!o.config_path.empty()) {
        cfg = qftail::config_from_file(o.config_path);
    } else if (!default_methods.empty()) {
        cfg.methods = std::move(default_methods);
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.output_path = *o.out;
    if (!o.methods.empty()) cfg.methods = o.methods;
    if (o.epsilon) cfg.epsilon = *o.epsilon;
    if (o.samples_is) cfg.samples_is = *o.samples_is;
    if (o.samples_mc) cfg.samples_mc = *o.samples_mc;
    if (!o.gamma_db.empty()) cfg.gamma_db = o.gamma_db;
    if (!o.n_values.empty()) cfg.n_values = o.n_values;
    if (o.xi) cfg.xi = *o.xi;
    if (o.rho) cfg.rho = *o.rho;
    if (o.mu) cfg.mu_value = *o.mu;
    if (o.workers) cfg.workers = *o.workers;
    if (o.pilot) cfg.pilot = *o.pilot;
    if (o.reference_data) cfg.reference_data = *o.reference_data;
    if (o.problem) {
        cfg.family = "file";
        cfg.problem_file = *o.problem;
    }
    if (o.no_timing) cfg.timing = false;
    return cfg;
}

void emit_csv(const qftail::ExperimentConfig& cfg, const std::vector<qftail::SweepRecord>& rows) {
    if (cfg.output_path.empty()) {
        qftail::write_csv(std::cout, rows);
        return;
    }
    std::ofstream out(cfg.output_path);
    if (!out) throw qftail::Error(qftail::Errc::ConfigError, "cannot write " + cfg.output_path);
    qftail::write_csv(out, rows);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Left-tail probabilities of Gaussian quadratic forms"};
    app.require_subcommand(1);

    Overrides sweep_o, plan_o, compare_o;
    auto* sweep = app.add_subcommand("sweep", "threshold sweep over dimensions and methods");
    add_experiment_flags(*sweep, sweep_o);
    auto* plan = app.add_subcommand("plan", "runs needed by naive MC and IS for a relative-error target");
    add_experiment_flags(*plan, plan_o);
    auto* compare = app.add_subcommand("compare", "method comparison with timing over repeated evaluations");
    add_experiment_flags(*compare, compare_o);

    auto* estimate = app.add_subcommand("estimate", "single estimate for a problem file, as JSON");
    std::string problem_path;
    std::string method = "is";
    std::uint64_t samples = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::optional<double> gamma_db;
    std::optional<double> gamma_linear;
    std::optional<std::string> estimate_out;
    estimate->add_option("--problem", problem_path, "problem file")->required();
    estimate->add_option("--method", method, "is or mc")->check(CLI::IsMember({"is", "mc"}));
    estimate->add_option("--samples", samples, "number of samples");
    estimate->add_option("--seed", seed, "RNG seed");
    estimate->add_option("--workers", workers, "sampling threads (0 = all cores)");
    auto* db_opt = estimate->add_option("--gamma-db", gamma_db, "threshold in dB");
    auto* lin_opt = estimate->add_option("--gamma-linear", gamma_linear, "threshold on the linear scale");
    db_opt->excludes(lin_opt);
    estimate->add_option("--out", estimate_out, "output JSON path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sweep->parsed()) {
            const auto cfg = build_config(sweep_o, {});
            emit_csv(cfg, qftail::run_sweep(cfg));
        } else if (plan->parsed()) {
            const auto cfg = build_config(plan_o, {"is", "mc"});
            std::cerr << "note: IS run counts are pilot-based (pilot = " << cfg.pilot << " samples)\n";
            emit_csv(cfg, qftail::run_plan(cfg));
        } else if (compare->parsed()) {
            auto cfg = build_config(compare_o, {"is", "imhof", "spa"});
            if (compare_o.gamma_db.empty() && compare_o.config_path.empty()) cfg.gamma_db = {5.0};
            const auto rows = qftail::run_compare(cfg);
            emit_csv(cfg, rows);
            std::cerr << "mean seconds per evaluation over " << cfg.repetitions << " repetitions\n";
            qftail::write_timing_table(std::cerr, rows);
        } else if (estimate->parsed()) {
            if (!gamma_db && !gamma_linear) {
                std::cerr << "error: one of --gamma-db or --gamma-linear is required\n";
                return 2;
            }
            const double gamma0 = gamma_linear ? *gamma_linear : qftail::db_to_linear(*gamma_db);
            const auto problem = qftail::read_problem_file(problem_path, gamma0);
            const auto m = method == "mc" ? qftail::Method::NaiveMc : qftail::Method::ImportanceSampling;
            const std::string json = qftail::to_json(qftail::run_estimate(problem, m, samples, seed, workers));
            if (estimate_out) {
                std::ofstream out(*estimate_out);
                if (!out) throw qftail::Error(qftail::Errc::ConfigError, "cannot write " + *estimate_out);
                out << json;
            } else {
                std::cout << json;
            }
        }
    } catch (const qftail::Error& e) {
        std::cerr << "error [" << qftail::to_string(e.code()) << "]: " << e.what() << '\n';
        return qftail::is_user_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
