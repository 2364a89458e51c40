#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hjmm {

enum class ErrorCode {
    DomainError,
    NonIntegrable,
    UnsupportedSpec,
    NonPositiveFactor,
    NonPositiveInitialCurve,
    SecondMomentInfinite,
    NotTimeOnly,
    ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::NonIntegrable: return "NonIntegrable";
        case ErrorCode::UnsupportedSpec: return "UnsupportedSpec";
        case ErrorCode::NonPositiveFactor: return "NonPositiveFactor";
        case ErrorCode::NonPositiveInitialCurve: return "NonPositiveInitialCurve";
        case ErrorCode::SecondMomentInfinite: return "SecondMomentInfinite";
        case ErrorCode::NotTimeOnly: return "NotTimeOnly";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace hjmm
