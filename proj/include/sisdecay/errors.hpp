#pragma once

#include <stdexcept>
#include <string>

namespace sisdecay {

enum class ErrorKind {
    InvalidParameter,
    ReducibleChain,
    UnsupportedStructure,
    DegenerateCoefficients,
    InsufficientCoefficients,
    InconsistentCoefficients,
    PrecisionExhausted,
    DivergentIntegral,
    DomainError,
    QuadratureFailure,
    FitUnreliable,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Quadrature that did not meet its tolerance; carries the achieved estimate.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double achieved)
        : Error(ErrorKind::QuadratureFailure, what), achieved_(achieved) {}

    [[nodiscard]] double achieved_error() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace sisdecay
