#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wdforge {

/// Stable error codes surfaced through the CLI as machine-readable strings.
enum class Err {
    ReduciblePolynomial,
    UnverifiedIrreducibility,
    NonSplitCharPoly,
    SingularMatrix,
    DivisionByZero,
    ValidationFailed,
    WrongRank,
    UnsupportedRank,
    NoValuationData,
    UnsupportedBase,
    NotMonodromyModule,
    IndexOutOfRange,
    MixedParameters,
    NotFrobeniusSemisimple,
    ZeroParameter,
    UnsupportedLocalType,
    GroupTooLarge,
    SplittingFieldTooLarge,
    EqualCharacteristic,
    ZeroEigenvalue,
    Singular,
    RootSearchOverflow,
    RootSearchUnsupported,
    InvalidInput,
    Internal,
};

inline const char* err_name(Err e) {
    switch (e) {
        case Err::ReduciblePolynomial: return "ReduciblePolynomial";
        case Err::UnverifiedIrreducibility: return "UnverifiedIrreducibility";
        case Err::NonSplitCharPoly: return "NonSplitCharPoly";
        case Err::SingularMatrix: return "SingularMatrix";
        case Err::DivisionByZero: return "DivisionByZero";
        case Err::ValidationFailed: return "ValidationFailed";
        case Err::WrongRank: return "WrongRank";
        case Err::UnsupportedRank: return "UnsupportedRank";
        case Err::NoValuationData: return "NoValuationData";
        case Err::UnsupportedBase: return "UnsupportedBase";
        case Err::NotMonodromyModule: return "NotMonodromyModule";
        case Err::IndexOutOfRange: return "IndexOutOfRange";
        case Err::MixedParameters: return "MixedParameters";
        case Err::NotFrobeniusSemisimple: return "NotFrobeniusSemisimple";
        case Err::ZeroParameter: return "ZeroParameter";
        case Err::UnsupportedLocalType: return "UnsupportedLocalType";
        case Err::GroupTooLarge: return "GroupTooLarge";
        case Err::SplittingFieldTooLarge: return "SplittingFieldTooLarge";
        case Err::EqualCharacteristic: return "EqualCharacteristic";
        case Err::ZeroEigenvalue: return "ZeroEigenvalue";
        case Err::Singular: return "Singular";
        case Err::RootSearchOverflow: return "RootSearchOverflow";
        case Err::RootSearchUnsupported: return "RootSearchUnsupported";
        case Err::InvalidInput: return "InvalidInput";
        case Err::Internal: return "Internal";
    }
    return "Unknown";
}

/// Library-wide exception. `details` carries structured payloads such as the
/// list of violated invariants from a validation, or a serialized non-split
/// factor.
class WdError : public std::runtime_error {
  public:
    WdError(Err code, const std::string& message, std::vector<std::string> details = {})
        : std::runtime_error(std::string(err_name(code)) + ": " + message),
          code_(code),
          details_(std::move(details)) {}

    Err code() const { return code_; }
    const char* code_name() const { return err_name(code_); }
    const std::vector<std::string>& details() const { return details_; }

  private:
    Err code_;
    std::vector<std::string> details_;
};

[[noreturn]] inline void fail(Err code, const std::string& message,
                              std::vector<std::string> details = {}) {
    throw WdError(code, message, std::move(details));
}

/// Internal consistency assertion that stays on in release builds. Used for
/// invariants the library promises to re-check (commutation of semisimple
/// parts, report implications).
inline void hard_check(bool cond, const std::string& message) {
    if (!cond) fail(Err::Internal, "internal invariant violated: " + message);
}

}  // namespace wdforge
