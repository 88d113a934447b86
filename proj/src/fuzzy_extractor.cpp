#include "l2ai/fuzzy_extractor.hpp"

#include <bit>

#include "l2ai/counters.hpp"
#include "l2ai/error.hpp"
#include "l2ai/hash.hpp"

namespace l2ai {
namespace {

constexpr std::string_view kMsgDomain = "l2ai/fe/msg";
constexpr std::string_view kKeyDomain = "l2ai/fe/key";
constexpr std::string_view kCheckDomain = "l2ai/fe/check";

// 51 message bits packed MSB-first into 7 bytes; the last byte's low 5 bits stay 0.
using Message = std::array<std::uint8_t, (kCodeBlocks + 7) / 8>;

bool message_bit(const Message& m, std::size_t i) { return (m[i / 8] >> (7 - i % 8)) & 1U; }

void set_message_bit(Message& m, std::size_t i) { m[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8)); }

Message message_for(const Digest160& sigma) {
  const auto h = detail::sha256({as_bytes(kMsgDomain), sigma.view()});
  Message m{};
  std::copy_n(h.begin(), m.size(), m.begin());
  m.back() &= static_cast<std::uint8_t>(0xFFU << (m.size() * 8 - kCodeBlocks));
  return m;
}

BioTemplate::Array encode(const Message& m) {
  BioTemplate code;
  for (std::size_t block = 0; block < kCodeBlocks; ++block) {
    if (!message_bit(m, block)) continue;
    for (std::size_t r = 0; r < kRepetition; ++r) code.flip(block * kRepetition + r);
  }
  return code.bytes();
}

Digest160 key_mask(const Message& m) { return detail::sha256_160({as_bytes(kKeyDomain), m}); }

Digest160 check_digest(const Digest160& sigma) {
  return detail::sha256_160({as_bytes(kCheckDomain), sigma.view()});
}

Digest160 xor_raw(const Digest160& a, const Digest160& b) {
  Digest160::Array out{};
  for (std::size_t i = 0; i < Digest160::kSize; ++i) out[i] = a.bytes()[i] ^ b.bytes()[i];
  return Digest160(out);
}

}  // namespace

std::size_t hamming_distance(const BioTemplate& a, const BioTemplate& b) noexcept {
  std::size_t d = 0;
  for (std::size_t i = 0; i < BioTemplate::kBytes; ++i)
    d += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(a.bytes()[i] ^ b.bytes()[i])));
  return d;
}

Bytes HelperData::serialize() const {
  Bytes out;
  out.reserve(kWireSize);
  append(out, offset);
  append(out, mask.view());
  append(out, check.view());
  return out;
}

HelperData HelperData::parse(ByteView in) {
  ByteReader r(in);
  HelperData h;
  ByteView off = r.take(BioTemplate::kBytes);
  std::copy(off.begin(), off.end(), h.offset.begin());
  h.mask = Digest160::from_bytes(r.take(Digest160::kSize));
  h.check = Digest160::from_bytes(r.take(Digest160::kSize));
  r.expect_done();
  return h;
}

BioTemplate::Array codeword_for(const Digest160& sigma) { return encode(message_for(sigma)); }

FuzzyKey fe_gen(const BioTemplate& bio, Rng& rng) {
  ++op_counters().fe_count;
  FuzzyKey key;
  key.sigma = rng.digest();
  const Message m = message_for(key.sigma);
  const auto code = encode(m);
  for (std::size_t i = 0; i < BioTemplate::kBytes; ++i) key.tau.offset[i] = bio.bytes()[i] ^ code[i];
  key.tau.mask = xor_raw(key.sigma, key_mask(m));
  key.tau.check = check_digest(key.sigma);
  return key;
}

Digest160 fe_rep(const BioTemplate& noisy, const HelperData& tau) {
  ++op_counters().fe_count;
  BioTemplate::Array shifted{};
  for (std::size_t i = 0; i < BioTemplate::kBytes; ++i) shifted[i] = noisy.bytes()[i] ^ tau.offset[i];
  const BioTemplate received(shifted);

  Message m{};
  for (std::size_t block = 0; block < kCodeBlocks; ++block) {
    std::size_t ones = 0;
    for (std::size_t r = 0; r < kRepetition; ++r) ones += received.bit(block * kRepetition + r);
    if (ones > kMaxFlipsPerBlock) set_message_bit(m, block);
  }

  const Digest160 sigma = xor_raw(tau.mask, key_mask(m));
  if (check_digest(sigma) != tau.check)
    throw Error(ErrorCode::RecoveryFailure, "biometric reading outside the correction radius");
  return sigma;
}

}  // namespace l2ai
