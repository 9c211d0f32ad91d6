#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ists {

enum class ErrorCode {
    Argument,
    Backend,
    AttackUnsupported,
    Io,
    Format,
};

/// Stable machine-readable name, used as the CLI error prefix.
constexpr std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::Argument: return "argument-error";
    case ErrorCode::Backend: return "backend-error";
    case ErrorCode::AttackUnsupported: return "attack-unsupported";
    case ErrorCode::Io: return "io-error";
    case ErrorCode::Format: return "format-error";
    }
    return "unknown-error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_argument(const std::string& message) {
    throw Error(ErrorCode::Argument, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) throw_argument(message);
}

}  // namespace ists
