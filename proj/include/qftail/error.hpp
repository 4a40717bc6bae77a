#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qftail {

enum class Errc {
    NonSymmetric,
    NotPositiveDefinite,
    NotPSD,
    NonPositiveThreshold,
    DimensionMismatch,
    DegenerateForm,
    IterationLimit,
    DegenerateWeight,
    QuadratureFailure,
    NoConvergence,
    AtMeanSingularity,
    NonZeroMean,
    DegenerateProbability,
    ZeroEstimate,
    InvalidArgument,
    BaseOutOfRange,
    ParseError,
    ConfigError,
};

std::string_view to_string(Errc code) noexcept;

/// Library error with a machine-readable code. The CLI maps caller mistakes
/// (is_user_error) to exit status 2 and numerical failures to 1.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

bool is_user_error(Errc code) noexcept;

}  // namespace qftail
