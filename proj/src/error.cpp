#include "udisc/error.hpp"

namespace udisc {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotUnitary: return "NotUnitary";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NonSquare: return "NonSquare";
        case ErrorCode::NoZeroInHull: return "NoZeroInHull";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::InvalidState: return "InvalidState";
        case ErrorCode::CorrectionNotFound: return "CorrectionNotFound";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::UnsupportedGate: return "UnsupportedGate";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::TooManyQubits: return "TooManyQubits";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ShotMismatch: return "ShotMismatch";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace udisc
