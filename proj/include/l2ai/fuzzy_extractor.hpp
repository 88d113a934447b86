#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "l2ai/digest.hpp"
#include "l2ai/encoding.hpp"
#include "l2ai/rng.hpp"

namespace l2ai {

// 256-bit biometric reading. Bit 0 is the most significant bit of byte 0.
class BioTemplate {
 public:
  static constexpr std::size_t kBytes = 32;
  static constexpr std::size_t kBits = kBytes * 8;
  using Array = std::array<std::uint8_t, kBytes>;

  BioTemplate() = default;
  explicit BioTemplate(const Array& bits) : bits_(bits) {}

  static BioTemplate random(Rng& rng) { return BioTemplate(rng.bytes<kBytes>()); }

  const Array& bytes() const noexcept { return bits_; }
  bool bit(std::size_t i) const noexcept { return (bits_[i / 8] >> (7 - i % 8)) & 1U; }
  void flip(std::size_t i) noexcept { bits_[i / 8] ^= static_cast<std::uint8_t>(0x80U >> (i % 8)); }

  friend bool operator==(const BioTemplate&, const BioTemplate&) = default;

 private:
  Array bits_{};
};

std::size_t hamming_distance(const BioTemplate& a, const BioTemplate& b) noexcept;

// Code-offset sketch under a 5x repetition code. The template holds 51 full
// 5-bit blocks; the trailing bit carries no code symbol.
inline constexpr std::size_t kRepetition = 5;
inline constexpr std::size_t kCodeBlocks = BioTemplate::kBits / kRepetition;  // 51
inline constexpr std::size_t kMaxFlipsPerBlock = (kRepetition - 1) / 2;       // 2

// Public reproduction data (tau).
//   offset = bio XOR codeword(m),  m = first 51 bits of H("msg" || sigma)
//   mask   = sigma XOR H("key" || m)
//   check  = H("check" || sigma)
// The check digest is domain-separated from h(sigma) because h(sigma) is the
// secret biometric factor b_i and must not sit on the card.
struct HelperData {
  static constexpr std::size_t kWireSize = BioTemplate::kBytes + 2 * Digest160::kSize;

  BioTemplate::Array offset{};
  Digest160 mask;
  Digest160 check;

  Bytes serialize() const;
  static HelperData parse(ByteView in);

  friend bool operator==(const HelperData&, const HelperData&) = default;
};

struct FuzzyKey {
  Digest160 sigma;
  HelperData tau;
};

// Gen: sigma drawn from rng. Counts one fe op.
FuzzyKey fe_gen(const BioTemplate& bio, Rng& rng);

// Rep: majority-decodes each block, rebuilds sigma and checks it.
// Recovers sigma whenever every block carries at most 2 flipped bits.
// Throws Error(RecoveryFailure) when the check digest disagrees.
// Counts one fe op.
Digest160 fe_rep(const BioTemplate& noisy, const HelperData& tau);

// The 256-bit repetition codeword bound to sigma (offset XOR bio).
BioTemplate::Array codeword_for(const Digest160& sigma);

}  // namespace l2ai
