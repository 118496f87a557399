#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gjrvol {

enum class ErrorCode {
    EmptyInput,
    MalformedRow,
    TooShort,
    InvalidInput,
    InvalidParams,
    InvalidMeanSpec,
    NonPositiveVariance,
    InvalidInit,
    OrderMismatch,
    UnsupportedOrder,
    NuTooSmall,
    EmptyGrid,
    NoAdmissibleStart,
    SingularHessian,
    InvalidPreset,
};

std::string_view to_string(ErrorCode code);

/// Base class for every error raised by the library. `code()` identifies the
/// failure kind so callers (the CLI in particular) can map it to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class MalformedRowError : public Error {
public:
    MalformedRowError(std::size_t row, const std::string& detail);

    /// 1-based line number in the source, header included.
    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Raised by the variance recursion when sigma^2_t <= 0.
class NonPositiveVarianceError : public Error {
public:
    NonPositiveVarianceError(std::size_t index, double value);

    /// 0-based position in the returned variance series.
    [[nodiscard]] std::size_t index() const noexcept { return index_; }
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    std::size_t index_;
    double value_;
};

}  // namespace gjrvol
