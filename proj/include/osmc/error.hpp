#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace osmc {

enum class ErrorCode {
    InvalidInput,
    NonPlanarRotation,
    Disconnected,
    NotSimple,
    SNotFullFace,
    KTooSmall,
    ModeMismatch,
    IndexOutOfRange,
    DisconnectedCutSide,
    NotASimpleCycle,
    FingerprintCollisionDetected,
    ModePreconditionFailed,
    UnknownTerminal,
    CorruptEncoding,
    OddK,
    BudgetExceeded,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NonPlanarRotation: return "NonPlanarRotation";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::NotSimple: return "NotSimple";
    case ErrorCode::SNotFullFace: return "SNotFullFace";
    case ErrorCode::KTooSmall: return "KTooSmall";
    case ErrorCode::ModeMismatch: return "ModeMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DisconnectedCutSide: return "DisconnectedCutSide";
    case ErrorCode::NotASimpleCycle: return "NotASimpleCycle";
    case ErrorCode::FingerprintCollisionDetected: return "FingerprintCollisionDetected";
    case ErrorCode::ModePreconditionFailed: return "ModePreconditionFailed";
    case ErrorCode::UnknownTerminal: return "UnknownTerminal";
    case ErrorCode::CorruptEncoding: return "CorruptEncoding";
    case ErrorCode::OddK: return "OddK";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI exit-code contract) can dispatch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    /// The text without the code prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

} // namespace osmc
