#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radneumann {

enum class ErrorKind {
    NonFinite,
    EvaluationDomain,
    DegenerateZero,
    BracketFailure,
    IndexMismatch,
    InsufficientOscillation,
    NoBifurcation,
    NodalJump,
    LowerBoundViolation,
    Stall,
    ClassEscape,
    PositivityViolation,
    Precondition,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

    /// Hypothesis failures, as opposed to numerical ones.
    bool is_validation() const noexcept;

private:
    ErrorKind kind_;
};

}  // namespace radneumann
