#include "radneumann/errors.hpp"

namespace radneumann {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::EvaluationDomain: return "EvaluationDomain";
    case ErrorKind::DegenerateZero: return "DegenerateZero";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::IndexMismatch: return "IndexMismatch";
    case ErrorKind::InsufficientOscillation: return "InsufficientOscillation";
    case ErrorKind::NoBifurcation: return "NoBifurcation";
    case ErrorKind::NodalJump: return "NodalJump";
    case ErrorKind::LowerBoundViolation: return "LowerBoundViolation";
    case ErrorKind::Stall: return "Stall";
    case ErrorKind::ClassEscape: return "ClassEscape";
    case ErrorKind::PositivityViolation: return "PositivityViolation";
    case ErrorKind::Precondition: return "Precondition";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
{
}

bool Error::is_validation() const noexcept
{
    return kind_ == ErrorKind::NoBifurcation || kind_ == ErrorKind::Precondition;
}

}  // namespace radneumann
