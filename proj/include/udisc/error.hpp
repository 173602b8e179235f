#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace udisc {

enum class ErrorCode {
    NotUnitary,
    NoConvergence,
    NonSquare,
    NoZeroInHull,
    DimensionMismatch,
    InvalidState,
    CorrectionNotFound,
    InvalidSpec,
    UnsupportedGate,
    ParseError,
    TooManyQubits,
    LengthMismatch,
    EmptyInput,
    ShotMismatch,
    InvalidConfig,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-status mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace udisc
