#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcrlab {

enum class ErrorCode {
    InvalidArgument,
    QuadratureNotConverged,
    DivisionDegenerate,
    NoRootInBracket,
    GridTooCoarse,
    PeaksNotResolved,
    FitDiverged,
    DataOutOfRange,
    ConfigInvalid,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorCode::DivisionDegenerate: return "DivisionDegenerate";
        case ErrorCode::NoRootInBracket: return "NoRootInBracket";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::PeaksNotResolved: return "PeaksNotResolved";
        case ErrorCode::FitDiverged: return "FitDiverged";
        case ErrorCode::DataOutOfRange: return "DataOutOfRange";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    }
    return "Unknown";
}

/// Single exception type for the library; `code()` distinguishes the failure.
/// Validation failures (InvalidArgument, ConfigInvalid) are user errors, the
/// rest are numerical failures.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    bool is_validation() const noexcept {
        return code_ == ErrorCode::InvalidArgument || code_ == ErrorCode::ConfigInvalid;
    }

private:
    ErrorCode code_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw Error(ErrorCode::InvalidArgument, message);
}

}  // namespace qcrlab
