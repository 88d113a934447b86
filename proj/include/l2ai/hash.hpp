#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string_view>

#include "l2ai/clock.hpp"
#include "l2ai/digest.hpp"
#include "l2ai/encoding.hpp"

namespace l2ai {

inline constexpr std::string_view kHashAlgorithm = "sha256-trunc160";

// h(.): first 160 bits of SHA-256. Counts one hash.
Digest160 hash(ByteView data);
inline Digest160 hash(const Digest160& d) { return hash(d.view()); }

// h(a || b || ...) over the raw bytes of each part. Counts one hash.
Digest160 hash_concat(std::initializer_list<ByteView> parts);

// Bitwise XOR. Counts one xor.
Digest160 xor_digest(const Digest160& a, const Digest160& b);

// Width-normalised stand-in for a 320-bit concatenation used as an XOR
// operand: h(a || b). Counts one hash.
Digest160 concat_mask(const Digest160& a, const Digest160& b);

// Fixed-width big-endian encoding of a timestamp for hash inputs and wire.
inline std::array<std::uint8_t, 8> ts_bytes(Timestamp t) noexcept { return be64(t.millis); }

namespace detail {

// Uncounted SHA-256 for ledger chaining and internal key derivation.
std::array<std::uint8_t, 32> sha256(std::initializer_list<ByteView> parts);
Digest160 sha256_160(std::initializer_list<ByteView> parts);

}  // namespace detail

}  // namespace l2ai
