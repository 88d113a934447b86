#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace l2ai {

enum class ErrorCode {
  AuthFailure,        // cipher tag mismatch
  RecoveryFailure,    // fuzzy extractor could not reproduce the key
  NotFound,
  InvalidRole,
  UnknownToken,       // registration with an X that is not on the ledger
  AlreadyRegistered,
  LocalVerifyFailed,  // F* != F on the user device
  Stale,              // timestamp outside the freshness window
  UnknownPrincipal,   // pseudo-identity or token hash not live on the ledger
  Unauthorized,
  BadMac,
  NoSession,
  UnknownSeq,
  ParseError,
  ConfigError,
  AssertionFailure,
  IOError,
};

std::string_view to_string(ErrorCode code) noexcept;
std::optional<ErrorCode> parse_error_code(std::string_view name) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace l2ai
