#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmfill {

enum class ErrorCode {
    // params_config
    NegativeParameter,
    SpreadNonPositive,
    RhoOutOfRange,
    GridAsymmetric,
    GridTooCoarse,
    InvalidHorizon,
    InvalidInventoryBound,
    ParseError,
    ValidationError,
    // dpe_solver
    UnstableScheme,
    // market_data
    SchemaMismatch,
    MalformedRow,
    NonMonotoneTimestamp,
    EmptyInput,
    NoDataBeforeStart,
    NoTrades,
    // strategy_sim
    InventoryBoundBreach,
    SeriesTooShort,
    PolicyShapeMismatch,
    // basic_poster
    EmptySeries,
    // reporting
    EmptyValues,
    IoError,
};

constexpr std::string_view error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::NegativeParameter: return "NegativeParameter";
    case ErrorCode::SpreadNonPositive: return "SpreadNonPositive";
    case ErrorCode::RhoOutOfRange: return "RhoOutOfRange";
    case ErrorCode::GridAsymmetric: return "GridAsymmetric";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::InvalidHorizon: return "InvalidHorizon";
    case ErrorCode::InvalidInventoryBound: return "InvalidInventoryBound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnstableScheme: return "UnstableScheme";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonMonotoneTimestamp: return "NonMonotoneTimestamp";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NoDataBeforeStart: return "NoDataBeforeStart";
    case ErrorCode::NoTrades: return "NoTrades";
    case ErrorCode::InventoryBoundBreach: return "InventoryBoundBreach";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::PolicyShapeMismatch: return "PolicyShapeMismatch";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::EmptyValues: return "EmptyValues";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable code. what() is "<CodeName>: <detail>".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Row-level parse failure; line is 1-based and counts the header.
class RowError : public Error {
public:
    RowError(ErrorCode code, std::size_t line, const std::string& detail)
        : Error(code, "line " + std::to_string(line) + ": " + detail), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace mmfill
