#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liquiforge {

enum class ErrorCode {
    NotOnGrid,
    Degenerate,
    NegativeTimeOrder,
    InvalidSpec,
    MissingNumeraire,
    GridMismatch,
    EmptySchedule,
    NonAdaptedTrigger,
    SingularRegression,
    BumpTooSmall,
    NonIndependentStream,
    MaturitySetMismatch,
    SingularMarket,
    MissingProfile,
    HedgeInitMismatch,
    InsufficientRefinements,
    MissingInput,
    GapBeyondHorizon,
    OutOfCurveSupport,
    UnknownDemo,
    ConfigInvalid,
    AssertionFailed,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotOnGrid: return "NOT_ON_GRID";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::NegativeTimeOrder: return "NEGATIVE_TIME_ORDER";
    case ErrorCode::InvalidSpec: return "INVALID_SPEC";
    case ErrorCode::MissingNumeraire: return "MISSING_NUMERAIRE";
    case ErrorCode::GridMismatch: return "GRID_MISMATCH";
    case ErrorCode::EmptySchedule: return "EMPTY_SCHEDULE";
    case ErrorCode::NonAdaptedTrigger: return "NON_ADAPTED_TRIGGER";
    case ErrorCode::SingularRegression: return "SINGULAR_REGRESSION";
    case ErrorCode::BumpTooSmall: return "BUMP_TOO_SMALL";
    case ErrorCode::NonIndependentStream: return "NON_INDEPENDENT_STREAM";
    case ErrorCode::MaturitySetMismatch: return "MATURITY_SET_MISMATCH";
    case ErrorCode::SingularMarket: return "SINGULAR_MARKET";
    case ErrorCode::MissingProfile: return "MISSING_PROFILE";
    case ErrorCode::HedgeInitMismatch: return "HEDGE_INIT_MISMATCH";
    case ErrorCode::InsufficientRefinements: return "INSUFFICIENT_REFINEMENTS";
    case ErrorCode::MissingInput: return "MISSING_INPUT";
    case ErrorCode::GapBeyondHorizon: return "GAP_BEYOND_HORIZON";
    case ErrorCode::OutOfCurveSupport: return "OUT_OF_CURVE_SUPPORT";
    case ErrorCode::UnknownDemo: return "UNKNOWN_DEMO";
    case ErrorCode::ConfigInvalid: return "CONFIG_INVALID";
    case ErrorCode::AssertionFailed: return "ASSERTION_FAILED";
    }
    return "UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

} // namespace liquiforge
