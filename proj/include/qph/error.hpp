#pragma once

#include <stdexcept>
#include <string>

namespace qph {

enum class ErrorKind {
    EmptySubset,
    InvalidSubset,
    DimensionMismatch,
    NotHermitian,
    EigFailed,
    InvalidState,
    ParseError,
    ZeroState,
    MonotonicityViolation,
    TooLarge,
    InfiniteBar,
    Precondition,
};

inline const char *to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::EmptySubset: return "EmptySubset";
        case ErrorKind::InvalidSubset: return "InvalidSubset";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::EigFailed: return "EigFailed";
        case ErrorKind::InvalidState: return "InvalidState";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ZeroState: return "ZeroState";
        case ErrorKind::MonotonicityViolation: return "MonotonicityViolation";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::InfiniteBar: return "InfiniteBar";
        case ErrorKind::Precondition: return "Precondition";
    }
    return "Unknown";
}

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Numerical failures as opposed to bad input.
    bool is_numerical() const noexcept {
        return kind_ == ErrorKind::NotHermitian || kind_ == ErrorKind::EigFailed;
    }

private:
    ErrorKind kind_;
};

}  // namespace qph
