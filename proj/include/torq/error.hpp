#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace torq {

enum class ErrorKind {
    NonPositiveCapacitance,
    NegativeJosephsonEnergy,
    BiasDesignMismatch,
    InvalidConfig,
    UnsupportedDesign,
    GridTooCoarse,
    InvalidArgument,
    ConvergenceFailure,
    NoBracket,
    InvalidRealization,
    Io,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library. `subject()` names the offending field,
// key, path or bias point so front ends can report it without parsing `what()`.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string subject, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          subject_(std::move(subject)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    ErrorKind kind_;
    std::string subject_;
};

}  // namespace torq
