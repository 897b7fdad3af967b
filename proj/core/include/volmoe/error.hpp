#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace volmoe {

enum class ErrorKind {
    InvalidParameter,
    DegenerateDistribution,
    SingularSystem,
    Dimension,
    NumericOverflow,
    InvalidInput,
    Config,
    Parse,
    Validation,
    Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and tests)
/// can branch on the category without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace volmoe
