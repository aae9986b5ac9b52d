#pragma once

#include <stdexcept>
#include <string>

namespace spsing {

enum class ErrorKind {
    NotSquare,
    DimensionMismatch,
    CompositeModulus,
    PairingInfeasible,
    KernelTooLarge,
    BudgetExceeded,
    EmptyVector,
    InfeasibleDensity,
    InvalidArgument,
    ParseError,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::CompositeModulus: return "CompositeModulus";
    case ErrorKind::PairingInfeasible: return "PairingInfeasible";
    case ErrorKind::KernelTooLarge: return "KernelTooLarge";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::EmptyVector: return "EmptyVector";
    case ErrorKind::InfeasibleDensity: return "InfeasibleDensity";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Budget-style failures: the input was fine but too big to process exactly.
    bool is_budget() const noexcept {
        return kind_ == ErrorKind::BudgetExceeded || kind_ == ErrorKind::KernelTooLarge;
    }

  private:
    ErrorKind kind_;
};

}  // namespace spsing
