#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "l2ai/encoding.hpp"

namespace l2ai {

// 160-bit value used for every hash output, identity, token, key and nonce
// in the protocol. Bit 0 is the most significant bit of byte 0.
class Digest160 {
 public:
  static constexpr std::size_t kSize = 20;
  static constexpr std::size_t kBits = kSize * 8;
  using Array = std::array<std::uint8_t, kSize>;

  constexpr Digest160() = default;
  constexpr explicit Digest160(const Array& bytes) : bytes_(bytes) {}

  // Throws Error(ParseError) unless exactly 20 bytes / 40 hex digits.
  static Digest160 from_bytes(ByteView bytes);
  static Digest160 from_hex(std::string_view hex);

  const Array& bytes() const noexcept { return bytes_; }
  ByteView view() const noexcept { return bytes_; }
  std::string hex() const { return to_hex(bytes_); }

  bool is_zero() const noexcept;
  bool bit(std::size_t i) const noexcept { return (bytes_[i / 8] >> (7 - i % 8)) & 1U; }
  void flip_bit(std::size_t i) noexcept { bytes_[i / 8] ^= static_cast<std::uint8_t>(0x80U >> (i % 8)); }

  friend bool operator==(const Digest160&, const Digest160&) = default;
  friend auto operator<=>(const Digest160&, const Digest160&) = default;

 private:
  Array bytes_{};
};

struct Digest160Hash {
  std::size_t operator()(const Digest160& d) const noexcept {
    // Digests are uniformly distributed already.
    return static_cast<std::size_t>(read_be64(d.view()));
  }
};

}  // namespace l2ai
