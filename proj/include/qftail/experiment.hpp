#pragma once

#include "qftail/bounds.hpp"
#include "qftail/canonical.hpp"
#include "qftail/sampler.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace qftail {

/// Threshold conversion used by every command: gamma0 = 10^(dB/10).
double db_to_linear(double db);

struct ExperimentConfig {
    std::string family = "toeplitz";  // "toeplitz" or "file"
    std::vector<long> n_values = {10, 20, 30};
    double xi = 0.4;
    double rho = 0.8;
    double mu_value = 1.0;
    std::vector<double> gamma_db = {-20, -15, -10, -5, 0, 5, 10};
    std::vector<std::string> methods = {"is", "mc", "bounds"};
    std::uint64_t samples_mc = 1000000;
    std::uint64_t samples_is = 10000;
    double epsilon = 0.05;
    std::uint64_t seed = 1;
    std::string output_path;
    std::string problem_file;        // family == "file"
    std::uint64_t pilot = 10000;     // planning pilot size
    unsigned workers = 0;
    bool timing = true;              // false writes 0 in the seconds column
    std::size_t repetitions = 10;    // compare: timed evaluations per cell
    std::string reference_data;      // compare: published series data (CSV)
};

inline constexpr std::string_view kKnownMethods[] = {"is", "mc", "imhof", "spa", "bounds"};

/// Parses a JSON document whose keys mirror ExperimentConfig; unknown keys are errors.
ExperimentConfig config_from_json(std::string_view text);
ExperimentConfig config_from_file(const std::filesystem::path& path);

/// Throws Error(ConfigError) on empty gamma_db/methods/n_values, unknown methods, etc.
void validate(const ExperimentConfig& cfg);

struct SweepRecord {
    std::string method;
    long n = 0;
    double gamma_db = 0.0;
    double value = 0.0;
    std::optional<double> rel_error;
    std::optional<double> runs;
    double seconds = 0.0;
    bool reliable = true;
};

inline constexpr std::string_view kCsvHeader = "method,n,gamma_db,value,rel_error,runs,seconds,reliable";

/// 17 significant digits; non-finite values as "nan"/"inf"/"-inf".
std::string format_double(double v);
std::string to_csv_row(const SweepRecord& r);
void write_csv(std::ostream& out, const std::vector<SweepRecord>& records);

/// Problem for one dimension of the configured family (n is ignored for "file").
QuadFormProblem make_problem(const ExperimentConfig& cfg, long n, double gamma0);

/// Every (n, gamma_db, method) cell; failures become rows with reliable = false.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg);

/// Rows "mc" and "is" per (n, gamma_db): value is the IS pilot estimate, runs the planned count.
std::vector<SweepRecord> run_plan(const ExperimentConfig& cfg);

/// Rows per (n, method) at each gamma_db with value and mean seconds over cfg.repetitions
/// timed evaluations (a warm-up evaluation is excluded). Published reference rows are
/// appended when cfg.reference_data has entries for the family.
std::vector<SweepRecord> run_compare(const ExperimentConfig& cfg);

/// Mean seconds per method (rows) and n (columns) from compare records.
void write_timing_table(std::ostream& out, const std::vector<SweepRecord>& records);

struct ReferenceKey {
    double xi;
    double rho;
    double mu;
    long n;
    auto operator<=>(const ReferenceKey&) const = default;
};

/// Published values of the m-term series approximation keyed by family and n:
/// "m200"/"m500" -> value. Lines starting with '#' are comments.
std::map<ReferenceKey, std::map<std::string, double>> load_reference_data(const std::filesystem::path& path);

std::filesystem::path default_reference_data_path();

struct EstimateReport {
    EstimateResult estimate;
    BoundReport bounds;
    double gamma0 = 0.0;
    std::size_t d = 0;
    std::size_t dropped = 0;
};

EstimateReport run_estimate(const QuadFormProblem& p, Method method, std::uint64_t samples, std::uint64_t seed,
                            unsigned workers = 0);

/// JSON object with estimate, variance, rel_error, ci_halfwidth, samples, seconds,
/// lower_bound, bre_constant (and context fields); floats with 17 significant digits.
std::string to_json(const EstimateReport& r);

}  // namespace qftail
