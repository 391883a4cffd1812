#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rsineq {

enum class ErrorCode {
    Syntax,
    DuplicateVariableInGroup,
    ZeroCoefficient,
    UndeclaredVariable,
    InconsistentContext,
    InvalidSequentialPair,
    ResidualDegree,
    EvenGroup,
    UnmappedVariable,
    TooManyVariables,
    UnknownVariable,
    InvalidDistribution,
    InvalidObservation,
    DimensionMismatch,
    NumericalBreakdown,
    TermOutsideContext,
    ProvisoViolated,
    DivisionByZeroCell,
    NonUnitVector,
    MissingSetting,
    MissingAssignment,
    InvalidAssignment,
    NotHermitian,
    InvalidState,
    InvalidArgument,
    AssertionFailure,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Every failure raised by the library is an `Error`; callers switch on `code()`.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Parse failure with a 1-based source position.
class SyntaxError : public Error {
public:
    SyntaxError(ErrorCode code, const std::string& message, std::size_t line, std::size_t column)
        : Error(code, message + " at " + std::to_string(line) + ":" + std::to_string(column)),
          line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace rsineq
