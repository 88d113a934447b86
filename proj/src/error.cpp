#include "l2ai/error.hpp"

namespace l2ai {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::AuthFailure: return "AuthFailure";
    case ErrorCode::RecoveryFailure: return "RecoveryFailure";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidRole: return "InvalidRole";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::AlreadyRegistered: return "AlreadyRegistered";
    case ErrorCode::LocalVerifyFailed: return "LocalVerifyFailed";
    case ErrorCode::Stale: return "Stale";
    case ErrorCode::UnknownPrincipal: return "UnknownPrincipal";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::BadMac: return "BadMac";
    case ErrorCode::NoSession: return "NoSession";
    case ErrorCode::UnknownSeq: return "UnknownSeq";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::AssertionFailure: return "AssertionFailure";
    case ErrorCode::IOError: return "IOError";
  }
  return "Unknown";
}

std::optional<ErrorCode> parse_error_code(std::string_view name) noexcept {
  for (int i = 0; i <= static_cast<int>(ErrorCode::IOError); ++i)
    if (to_string(static_cast<ErrorCode>(i)) == name) return static_cast<ErrorCode>(i);
  return std::nullopt;
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace l2ai
