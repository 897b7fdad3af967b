#include "volmoe/error.hpp"

namespace volmoe {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::DegenerateDistribution: return "degenerate-distribution";
    case ErrorKind::SingularSystem: return "singular-system";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::NumericOverflow: return "numeric-overflow";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

} // namespace volmoe
