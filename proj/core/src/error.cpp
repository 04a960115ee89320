#include "simcov/error.hpp"

namespace simcov {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_input: return "invalid-input";
        case ErrorCode::invalid_window: return "invalid-window";
        case ErrorCode::degenerate_column: return "degenerate-column";
        case ErrorCode::invalid_horizon: return "invalid-horizon";
        case ErrorCode::invalid_parameter: return "invalid-parameter";
        case ErrorCode::degenerate_similarity: return "degenerate-similarity";
        case ErrorCode::degenerate_restriction: return "degenerate-restriction";
        case ErrorCode::singular_covariance: return "singular-covariance";
        case ErrorCode::degenerate_frontier: return "degenerate-frontier";
        case ErrorCode::construction_error: return "construction-error";
        case ErrorCode::parse_error: return "parse-error";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace simcov
