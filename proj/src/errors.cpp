#include "gjrvol/errors.hpp"

#include <cstdio>

namespace gjrvol {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::TooShort: return "TooShort";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::InvalidMeanSpec: return "InvalidMeanSpec";
        case ErrorCode::NonPositiveVariance: return "NonPositiveVariance";
        case ErrorCode::InvalidInit: return "InvalidInit";
        case ErrorCode::OrderMismatch: return "OrderMismatch";
        case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
        case ErrorCode::NuTooSmall: return "NuTooSmall";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::NoAdmissibleStart: return "NoAdmissibleStart";
        case ErrorCode::SingularHessian: return "SingularHessian";
        case ErrorCode::InvalidPreset: return "InvalidPreset";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

MalformedRowError::MalformedRowError(std::size_t row, const std::string& detail)
    : Error(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": " + detail), row_(row) {}

namespace {
std::string variance_message(std::size_t index, double value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "sigma^2 = %.6g at t = %zu", value, index);
    return buf;
}
}  // namespace

NonPositiveVarianceError::NonPositiveVarianceError(std::size_t index, double value)
    : Error(ErrorCode::NonPositiveVariance, variance_message(index, value)),
      index_(index),
      value_(value) {}

}  // namespace gjrvol
