#include "qftail/experiment.hpp"

#include "qftail/baselines.hpp"
#include "qftail/error.hpp"
#include "qftail/genmat.hpp"
#include "qftail/planner.hpp"
#include "qftail/problem_io.hpp"

#include <fmt/core.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace qftail {

namespace {

using Clock = std::chrono::steady_clock;

Error config_error(const std::string& what) {
    return Error(Errc::ConfigError, what);
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error(fmt::format("config field '{}': {}", key, e.what()));
    }
}

SweepRecord failed_row(std::string method, long n, double gamma_db) {
    SweepRecord r;
    r.method = std::move(method);
    r.n = n;
    r.gamma_db = gamma_db;
    r.value = std::numeric_limits<double>::quiet_NaN();
    r.reliable = false;
    return r;
}

SweepRecord estimate_row(const EstimateResult& e, long n, double gamma_db, bool timing) {
    SweepRecord r;
    r.method = std::string(to_string(e.method));
    r.n = n;
    r.gamma_db = gamma_db;
    r.value = e.estimate;
    r.rel_error = e.rel_error;
    r.runs = static_cast<double>(e.samples);
    r.seconds = timing ? e.seconds : 0.0;
    r.reliable = e.rel_error.has_value();
    return r;
}

// One evaluation of `method` on a reduced problem, as a CSV row.
SweepRecord evaluate(const ExperimentConfig& cfg, const std::string& method, const CanonicalForm& cf, long n,
                     double gamma_db) {
    const double gamma0 = db_to_linear(gamma_db);
    const SamplerOptions opts{cfg.workers, 1.96};
    try {
        if (method == "is") {
            return estimate_row(importance_sampling(cf, gamma0, cfg.samples_is, cfg.seed, opts), n, gamma_db,
                                cfg.timing);
        }
        if (method == "mc") {
            return estimate_row(naive_mc(cf, gamma0, cfg.samples_mc, cfg.seed, opts), n, gamma_db, cfg.timing);
        }
        SweepRecord r;
        r.method = method;
        r.n = n;
        r.gamma_db = gamma_db;
        const auto start = Clock::now();
        if (method == "imhof") {
            const ImhofResult im = imhof(cf, gamma0);
            r.value = im.value;
            r.reliable = im.reliable;
        } else if (method == "spa") {
            r.value = spa(cf, gamma0).value;
        } else if (method == "bounds") {
            r.value = marcum_lower_bound(cf, gamma0);
        } else {
            throw config_error(fmt::format("unknown method '{}'", method));
        }
        r.seconds = cfg.timing ? std::chrono::duration<double>(Clock::now() - start).count() : 0.0;
        return r;
    } catch (const Error& e) {
        if (e.code() == Errc::ConfigError) throw;
        return failed_row(method, n, gamma_db);
    }
}

}  // namespace

double db_to_linear(double db) {
    return std::pow(10.0, db / 10.0);
}

ExperimentConfig config_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::ParseError, fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!j.is_object()) throw config_error("config must be a JSON object");
    static const std::set<std::string> known = {
        "family", "n_values", "xi", "rho", "mu_value", "gamma_db", "methods", "samples_mc", "samples_is", "epsilon",
        "seed", "output_path", "problem_file", "pilot", "workers", "timing", "repetitions", "reference_data"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw config_error(fmt::format("unknown config field '{}'", key));
    }
    ExperimentConfig cfg;
    read_field(j, "family", cfg.family);
    read_field(j, "n_values", cfg.n_values);
    read_field(j, "xi", cfg.xi);
    read_field(j, "rho", cfg.rho);
    read_field(j, "mu_value", cfg.mu_value);
    read_field(j, "gamma_db", cfg.gamma_db);
    read_field(j, "methods", cfg.methods);
    read_field(j, "samples_mc", cfg.samples_mc);
    read_field(j, "samples_is", cfg.samples_is);
    read_field(j, "epsilon", cfg.epsilon);
    read_field(j, "seed", cfg.seed);
    read_field(j, "output_path", cfg.output_path);
    read_field(j, "problem_file", cfg.problem_file);
    read_field(j, "pilot", cfg.pilot);
    read_field(j, "workers", cfg.workers);
    read_field(j, "timing", cfg.timing);
    read_field(j, "repetitions", cfg.repetitions);
    read_field(j, "reference_data", cfg.reference_data);
    return cfg;
}

ExperimentConfig config_from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, fmt::format("cannot open config file '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.gamma_db.empty()) throw config_error("gamma_db must not be empty");
    if (cfg.methods.empty()) throw config_error("methods must not be empty");
    for (const auto& m : cfg.methods) {
        if (std::find(std::begin(kKnownMethods), std::end(kKnownMethods), m) == std::end(kKnownMethods)) {
            throw config_error(fmt::format("unknown method '{}'", m));
        }
    }
    for (double db : cfg.gamma_db) {
        if (!std::isfinite(db)) throw config_error("gamma_db entries must be finite");
    }
    if (cfg.family == "toeplitz") {
        if (cfg.n_values.empty()) throw config_error("n_values must not be empty");
        for (long n : cfg.n_values) {
            if (n < 1) throw config_error(fmt::format("dimension {} is not positive", n));
        }
        if (!(cfg.xi > 0.0 && cfg.xi < 1.0) || !(cfg.rho > 0.0 && cfg.rho < 1.0)) {
            throw config_error("xi and rho must lie in (0, 1)");
        }
    } else if (cfg.family == "file") {
        if (cfg.problem_file.empty()) throw config_error("family 'file' needs problem_file");
    } else {
        throw config_error(fmt::format("unknown family '{}'", cfg.family));
    }
    if (cfg.samples_is < 2 || cfg.samples_mc < 1) throw config_error("sample counts too small");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw config_error("epsilon must lie in (0, 1)");
    if (cfg.pilot < 1000) throw config_error("pilot must be at least 1000");
    if (cfg.repetitions < 1) throw config_error("repetitions must be at least 1");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

std::string to_csv_row(const SweepRecord& r) {
    return fmt::format("{},{},{},{},{},{},{},{}", r.method, r.n, format_double(r.gamma_db), format_double(r.value),
                       r.rel_error ? format_double(*r.rel_error) : "", r.runs ? format_double(*r.runs) : "",
                       format_double(r.seconds), r.reliable ? "true" : "false");
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) out << to_csv_row(r) << '\n';
}

QuadFormProblem make_problem(const ExperimentConfig& cfg, long n, double gamma0) {
    if (cfg.family == "file") return read_problem_file(cfg.problem_file, gamma0);
    QuadFormProblem p;
    p.sigma = toeplitz_power(n, cfg.xi);
    p.sigma_x = toeplitz_power(n, cfg.rho);
    p.mu = constant_mean(n, cfg.mu_value);
    p.gamma0 = gamma0;
    return p;
}

namespace {

// Dimensions to iterate: the configured list, or the file's own N.
std::vector<std::pair<long, CanonicalForm>> reduced_problems(const ExperimentConfig& cfg) {
    std::vector<std::pair<long, CanonicalForm>> out;
    if (cfg.family == "file") {
        const QuadFormProblem p = make_problem(cfg, 0, 1.0);
        out.emplace_back(static_cast<long>(p.mu.size()), reduce(p));
    } else {
        for (long n : cfg.n_values) out.emplace_back(n, reduce(make_problem(cfg, n, 1.0)));
    }
    return out;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg) {
    validate(cfg);
    std::vector<SweepRecord> rows;
    for (const auto& [n, cf] : reduced_problems(cfg)) {
        for (double db : cfg.gamma_db) {
            for (const auto& method : cfg.methods) rows.push_back(evaluate(cfg, method, cf, n, db));
        }
    }
    return rows;
}

std::vector<SweepRecord> run_plan(const ExperimentConfig& cfg) {
    validate(cfg);
    const AccuracySpec spec{cfg.epsilon, 1.96};
    const SamplerOptions opts{cfg.workers, spec.confidence_c};
    std::vector<SweepRecord> rows;
    for (const auto& [n, cf] : reduced_problems(cfg)) {
        for (double db : cfg.gamma_db) {
            const double gamma0 = db_to_linear(db);
            SweepRecord mc = failed_row("mc", n, db);
            SweepRecord is = failed_row("is", n, db);
            try {
                const IsPlan plan = plan_is_runs(cf, gamma0, spec, cfg.pilot, cfg.seed, opts);
                is.value = mc.value = plan.pilot.estimate;
                is.runs = plan.runs;
                is.rel_error = plan.pilot.rel_error;
                is.seconds = cfg.timing ? plan.pilot.seconds : 0.0;
                is.reliable = true;
                mc.runs = mc_runs_required(plan.pilot.estimate, spec);
                mc.reliable = true;
            } catch (const Error&) {
                // ZeroEstimate and friends: keep the failed rows.
            }
            rows.push_back(mc);
            rows.push_back(is);
        }
    }
    return rows;
}

std::filesystem::path default_reference_data_path() {
    return std::filesystem::path(QFTAIL_DATA_DIR) / "series_reference.csv";
}

std::map<ReferenceKey, std::map<std::string, double>> load_reference_data(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, fmt::format("cannot open reference data '{}'", path.string()));
    std::map<ReferenceKey, std::map<std::string, double>> out;
    std::vector<std::string> columns;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (columns.empty()) {
            columns = cells;
            if (columns.size() < 5 || columns[0] != "xi" || columns[1] != "rho" || columns[2] != "mu" ||
                columns[3] != "n") {
                throw Error(Errc::ParseError, "reference data header must start with xi,rho,mu,n");
            }
            continue;
        }
        if (cells.size() != columns.size()) {
            throw Error(Errc::ParseError, fmt::format("reference data row has {} cells, expected {}", cells.size(),
                                                      columns.size()));
        }
        try {
            const ReferenceKey key{std::stod(cells[0]), std::stod(cells[1]), std::stod(cells[2]), std::stol(cells[3])};
            for (std::size_t c = 4; c < cells.size(); ++c) out[key][columns[c]] = std::stod(cells[c]);
        } catch (const std::exception&) {
            throw Error(Errc::ParseError, fmt::format("malformed reference data row '{}'", line));
        }
    }
    return out;
}

std::vector<SweepRecord> run_compare(const ExperimentConfig& cfg) {
    validate(cfg);
    std::map<ReferenceKey, std::map<std::string, double>> reference;
    if (cfg.family == "toeplitz") {
        const std::filesystem::path path =
            cfg.reference_data.empty() ? default_reference_data_path() : std::filesystem::path(cfg.reference_data);
        if (std::filesystem::exists(path)) reference = load_reference_data(path);
    }

    std::vector<SweepRecord> rows;
    for (const auto& [n, cf] : reduced_problems(cfg)) {
        for (double db : cfg.gamma_db) {
            for (const auto& method : cfg.methods) {
                if (method == "bounds") continue;
                ExperimentConfig timed = cfg;
                timed.timing = true;
                evaluate(timed, method, cf, n, db);  // warm-up, excluded
                SweepRecord first;
                double total = 0.0;
                for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
                    SweepRecord r = evaluate(timed, method, cf, n, db);
                    total += r.seconds;
                    if (rep == 0) first = r;
                }
                first.seconds = cfg.timing ? total / static_cast<double>(cfg.repetitions) : 0.0;
                rows.push_back(first);
            }
            if (db == 5.0) {
                const auto it = reference.find(ReferenceKey{cfg.xi, cfg.rho, cfg.mu_value, n});
                if (it != reference.end()) {
                    for (const auto& [column, value] : it->second) {
                        SweepRecord r;
                        r.method = "reference_" + column;
                        r.n = n;
                        r.gamma_db = db;
                        r.value = value;
                        rows.push_back(r);
                    }
                }
            }
        }
    }
    return rows;
}

void write_timing_table(std::ostream& out, const std::vector<SweepRecord>& records) {
    std::vector<long> ns;
    std::vector<std::string> methods;
    std::map<std::pair<std::string, long>, double> cell;
    for (const auto& r : records) {
        if (r.method.rfind("reference_", 0) == 0) continue;
        if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
        cell[{r.method, r.n}] = r.seconds;
    }
    out << fmt::format("{:<8}", "N");
    for (long n : ns) out << fmt::format("{:>12}", n);
    out << '\n';
    for (const auto& m : methods) {
        out << fmt::format("{:<8}", m);
        for (long n : ns) {
            const auto it = cell.find({m, n});
            out << (it == cell.end() ? fmt::format("{:>12}", "-") : fmt::format("{:>12.3e}", it->second));
        }
        out << '\n';
    }
}

EstimateReport run_estimate(const QuadFormProblem& p, Method method, std::uint64_t samples, std::uint64_t seed,
                            unsigned workers) {
    const CanonicalForm cf = reduce(p);
    const SamplerOptions opts{workers, 1.96};
    EstimateReport r;
    r.gamma0 = p.gamma0;
    r.d = cf.d();
    r.dropped = cf.dropped_mass;
    r.estimate = method == Method::ImportanceSampling ? importance_sampling(cf, p.gamma0, samples, seed, opts)
                                                      : naive_mc(cf, p.gamma0, samples, seed, opts);
    r.bounds = bound_report(cf, p.gamma0);
    return r;
}

std::string to_json(const EstimateReport& r) {
    auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("null"); };
    auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string("null"); };
    const nlohmann::json note = r.bounds.note;
    std::string s = "{\n";
    s += fmt::format("  \"method\": \"{}\",\n", to_string(r.estimate.method));
    s += fmt::format("  \"gamma0\": {},\n", num(r.gamma0));
    s += fmt::format("  \"d\": {},\n", r.d);
    s += fmt::format("  \"dropped_mass\": {},\n", r.dropped);
    s += fmt::format("  \"estimate\": {},\n", num(r.estimate.estimate));
    s += fmt::format("  \"variance\": {},\n", num(r.estimate.variance));
    s += fmt::format("  \"rel_error\": {},\n", opt(r.estimate.rel_error));
    s += fmt::format("  \"ci_halfwidth\": {},\n", num(r.estimate.ci_halfwidth));
    s += fmt::format("  \"samples\": {},\n", r.estimate.samples);
    s += fmt::format("  \"seconds\": {},\n", num(r.estimate.seconds));
    s += fmt::format("  \"lower_bound\": {},\n", num(r.bounds.lower_bound));
    s += fmt::format("  \"bre_constant\": {},\n", opt(r.bounds.bre_constant));
    s += fmt::format("  \"note\": {}\n", note.dump());
    s += "}\n";
    return s;
}

}  // namespace qftail
