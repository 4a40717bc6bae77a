#include "qftail/error.hpp"

namespace qftail {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NonSymmetric: return "NonSymmetric";
        case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
        case Errc::NotPSD: return "NotPSD";
        case Errc::NonPositiveThreshold: return "NonPositiveThreshold";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::DegenerateForm: return "DegenerateForm";
        case Errc::IterationLimit: return "IterationLimit";
        case Errc::DegenerateWeight: return "DegenerateWeight";
        case Errc::QuadratureFailure: return "QuadratureFailure";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::AtMeanSingularity: return "AtMeanSingularity";
        case Errc::NonZeroMean: return "NonZeroMean";
        case Errc::DegenerateProbability: return "DegenerateProbability";
        case Errc::ZeroEstimate: return "ZeroEstimate";
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::BaseOutOfRange: return "BaseOutOfRange";
        case Errc::ParseError: return "ParseError";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

bool is_user_error(Errc code) noexcept {
    switch (code) {
        case Errc::NonSymmetric:
        case Errc::NotPositiveDefinite:
        case Errc::NotPSD:
        case Errc::NonPositiveThreshold:
        case Errc::DimensionMismatch:
        case Errc::NonZeroMean:
        case Errc::InvalidArgument:
        case Errc::BaseOutOfRange:
        case Errc::ParseError:
        case Errc::ConfigError:
        case Errc::DegenerateProbability:
            return true;
        default:
            return false;
    }
}

}  // namespace qftail
