#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "l2ai/digest.hpp"
#include "l2ai/encoding.hpp"
#include "l2ai/rng.hpp"

namespace l2ai {

inline constexpr std::string_view kCipherAlgorithm = "chacha20-poly1305/sha256-kdf";

// Authenticated ciphertext envelope: the nonce travels with the body.
struct Ciphertext {
  static constexpr std::size_t kNonceSize = 12;
  static constexpr std::size_t kTagSize = 16;

  std::array<std::uint8_t, kNonceSize> nonce{};
  Bytes body;
  std::array<std::uint8_t, kTagSize> tag{};

  // u32 body length || nonce || body || tag
  Bytes serialize() const;
  static Ciphertext parse(ByteView in);

  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

// Keyed by SHA-256(domain || key); the nonce comes from the caller's
// seeded generator so whole runs stay reproducible. Counts one enc.
Ciphertext enc(const Digest160& key, ByteView plaintext, Rng& rng);

// Counts one dec. Throws Error(AuthFailure) on a wrong key or any tampering.
Bytes dec(const Digest160& key, const Ciphertext& ct);

}  // namespace l2ai
