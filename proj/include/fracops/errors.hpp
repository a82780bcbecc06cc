#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracops {

enum class ErrorCode {
    InvalidArgument,
    InvalidInput,
    InvalidOrder,
    NotPositiveOperator,
    AccuracyNotMet,
    DomainError,
    SolverError,
    ConfigParse,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base of every error raised by the library. The code identifies the
/// failure class; the message carries the context.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when a quadrature cannot certify its tolerance. The achieved
/// error estimate is attached.
class AccuracyNotMet : public Error {
public:
    AccuracyNotMet(const std::string& message, double achieved, double requested)
        : Error(ErrorCode::AccuracyNotMet, message), achieved_(achieved), requested_(requested) {}

    double achieved() const noexcept { return achieved_; }
    double requested() const noexcept { return requested_; }

private:
    double achieved_;
    double requested_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace fracops
