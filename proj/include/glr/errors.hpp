#pragma once

#include <stdexcept>
#include <string>

namespace glr {

// Machine-readable failure codes. Every thrown glr::Error carries one; the
// CLI prints them verbatim as the one-line diagnostic code.
enum class ErrorCode {
    BadProbability,
    RaggedHorizon,
    OrphanNode,
    NonFiniteNumber,
    KeyMismatch,
    DimensionMismatch,
    NumericalBreakdown,
    ZeroPayoff,
    BadLambda,
    BadScale,
    BadSpec,
    PreconditionViolated,
    ParseError,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadProbability: return "BadProbability";
        case ErrorCode::RaggedHorizon: return "RaggedHorizon";
        case ErrorCode::OrphanNode: return "OrphanNode";
        case ErrorCode::NonFiniteNumber: return "NonFiniteNumber";
        case ErrorCode::KeyMismatch: return "KeyMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
        case ErrorCode::ZeroPayoff: return "ZeroPayoff";
        case ErrorCode::BadLambda: return "BadLambda";
        case ErrorCode::BadScale: return "BadScale";
        case ErrorCode::BadSpec: return "BadSpec";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace glr
