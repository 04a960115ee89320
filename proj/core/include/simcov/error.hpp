#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace simcov {

enum class ErrorCode {
    invalid_input,
    invalid_window,
    degenerate_column,
    invalid_horizon,
    invalid_parameter,
    degenerate_similarity,
    degenerate_restriction,
    singular_covariance,
    degenerate_frontier,
    construction_error,
    parse_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace simcov
