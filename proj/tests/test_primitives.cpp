#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "l2ai/cipher.hpp"
#include "l2ai/clock.hpp"
#include "l2ai/counters.hpp"
#include "l2ai/error.hpp"
#include "l2ai/hash.hpp"

namespace l2ai {
namespace {

Bytes random_bytes(Rng& rng, std::size_t n) {
  Bytes b(n);
  rng.fill(b.data(), n);
  return b;
}

// First 20 bytes of the FIPS 180-2 SHA-256 test vectors.
TEST(Hash, MatchesPublishedSha256Vectors) {
  EXPECT_EQ(hash(ByteView{}).hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4");
  EXPECT_EQ(hash(as_bytes("abc")).hex(), "ba7816bf8f01cfea414140de5dae2223b00361a3");
  EXPECT_EQ(hash(as_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")).hex(),
            "248d6a61d20638b8e5c026930c3e6039a33ce459");
}

TEST(Hash, DeterministicAndSplitInvariant) {
  const Bytes data = {1, 2, 3, 4, 5, 6};
  EXPECT_EQ(hash(data), hash(data));
  EXPECT_EQ(hash(data), hash_concat({ByteView(data).first(2), ByteView(data).subspan(2)}));
}

TEST(Hash, NoCollisionsOverRandomDistinctPairs) {
  Rng rng(7);
  std::set<Digest160> seen;
  std::set<Bytes> inputs;
  for (int i = 0; i < 10'000; ++i) {
    Bytes a = random_bytes(rng, 1 + rng.uniform(64));
    Bytes b = a;
    b[rng.uniform(b.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
    ASSERT_NE(hash(a), hash(b));
    seen.insert(hash(a));
    inputs.insert(a);
  }
  EXPECT_EQ(seen.size(), inputs.size());
}

// Output bits balanced within 3 sigma over 10,000 inputs.
TEST(Hash, OutputBitBalanceSmoke) {
  Rng rng(11);
  std::uint64_t ones = 0;
  constexpr int kInputs = 10'000;
  for (int i = 0; i < kInputs; ++i) {
    const Digest160 d = hash(random_bytes(rng, 32));
    for (std::size_t bit = 0; bit < Digest160::kBits; ++bit) ones += d.bit(bit);
  }
  const double n = static_cast<double>(kInputs) * Digest160::kBits;
  const double p = static_cast<double>(ones) / n;
  const double sigma = std::sqrt(0.25 / n);
  EXPECT_LT(std::abs(p - 0.5), 3 * sigma);
}

TEST(Xor, AlgebraProperties) {
  Rng rng(3);
  const Digest160 zero{};
  for (int i = 0; i < 1000; ++i) {
    const Digest160 a = rng.digest(), b = rng.digest(), c = rng.digest();
    EXPECT_TRUE(xor_digest(a, a).is_zero());
    EXPECT_EQ(xor_digest(a, zero), a);
    EXPECT_EQ(xor_digest(xor_digest(a, b), b), a);
    EXPECT_EQ(xor_digest(a, b), xor_digest(b, a));
    EXPECT_EQ(xor_digest(xor_digest(a, b), c), xor_digest(a, xor_digest(b, c)));
  }
}

TEST(ConcatMask, IsHashOfConcatenation) {
  Rng rng(5);
  const Digest160 a = rng.digest(), b = rng.digest();
  Bytes joined(a.bytes().begin(), a.bytes().end());
  joined.insert(joined.end(), b.bytes().begin(), b.bytes().end());
  EXPECT_EQ(concat_mask(a, b), hash(joined));

  const Digest160 t = rng.digest();
  EXPECT_EQ(xor_digest(xor_digest(t, concat_mask(a, b)), concat_mask(a, b)), t);
}

TEST(ConcatMask, OrderMatters) {
  Rng rng(6);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) {
    const Digest160 a = rng.digest(), b = rng.digest();
    ASSERT_NE(a, b);
    equal += concat_mask(a, b) == concat_mask(b, a);
  }
  EXPECT_EQ(equal, 0);
}

TEST(Cipher, RoundTripProperty) {
  Rng rng(9);
  for (std::size_t len : {0u, 1u, 19u, 20u, 64u, 1000u, 4096u}) {
    const Digest160 key = rng.digest();
    const Bytes p = random_bytes(rng, len);
    EXPECT_EQ(dec(key, enc(key, p, rng)), p) << len;
  }
  for (int i = 0; i < 200; ++i) {
    const Digest160 key = rng.digest();
    const Bytes p = random_bytes(rng, rng.uniform(4097));
    ASSERT_EQ(dec(key, enc(key, p, rng)), p);
  }
}

TEST(Cipher, WrongKeyFailsAuthentication) {
  Rng rng(10);
  const Digest160 k = rng.digest(), k2 = rng.digest();
  const auto ct = enc(k, as_bytes("token"), rng);
  try {
    dec(k2, ct);
    FAIL() << "decrypted under the wrong key";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthFailure);
  }
}

TEST(Cipher, EveryByteFlipIsDetected) {
  Rng rng(12);
  const Digest160 key = rng.digest();
  const Digest160 tg = rng.digest();
  const Bytes wire = enc(key, tg.view(), rng).serialize();
  // Skip the length prefix: a changed length is a parse error, not a cipher question.
  for (std::size_t i = 4; i < wire.size(); ++i) {
    Bytes bad = wire;
    bad[i] ^= 0x01;
    const Ciphertext ct = Ciphertext::parse(bad);
    EXPECT_THROW(dec(key, ct), Error) << "byte " << i;
  }
}

TEST(Cipher, FreshNonceEveryCall) {
  Rng rng(13);
  const Digest160 key = rng.digest();
  std::set<Bytes> seen;
  for (int i = 0; i < 100; ++i) seen.insert(enc(key, as_bytes("same plaintext"), rng).serialize());
  EXPECT_EQ(seen.size(), 100u);
}

TEST(Cipher, EmptyPlaintext) {
  Rng rng(14);
  const Digest160 key = rng.digest();
  EXPECT_TRUE(dec(key, enc(key, ByteView{}, rng)).empty());
}

TEST(Counters, EachCountedCallIncrementsExactlyOnce) {
  const OpCounters before = op_counters();
  Rng rng(15);
  const Digest160 a = rng.digest(), b = rng.digest();
  constexpr int kCalls = 37;
  for (int i = 0; i < kCalls; ++i) (void)hash(a);
  (void)hash_concat({a.view(), b.view()});
  (void)concat_mask(a, b);
  (void)xor_digest(a, b);
  const auto ct = enc(a, b.view(), rng);
  (void)dec(a, ct);
  const OpCounters d = op_counters() - before;
  EXPECT_EQ(d.hash_count, kCalls + 2u);
  EXPECT_EQ(d.xor_count, 1u);
  EXPECT_EQ(d.enc_count, 1u);
  EXPECT_EQ(d.dec_count, 1u);
  EXPECT_EQ(d.fe_count, 0u);
}

TEST(Clock, StartsAtZeroAndAdvances) {
  SimClock clock;
  EXPECT_EQ(clock_now(clock), ms(0));
  clock.advance(5);
  EXPECT_EQ(clock_now(clock), ms(5));
  EXPECT_EQ(clock_now(clock), clock_now(clock));
  clock.advance_to(ms(3));
  EXPECT_EQ(clock.now(), ms(5));
}

TEST(Clock, FreshnessIsSymmetricAndInclusive) {
  EXPECT_TRUE(is_fresh(ms(100), ms(100), ms(0)));
  EXPECT_FALSE(is_fresh(ms(100), ms(97), ms(2)));
  EXPECT_FALSE(is_fresh(ms(97), ms(100), ms(2)));
  EXPECT_TRUE(is_fresh(ms(100), ms(98), ms(2)));
  EXPECT_TRUE(is_fresh(ms(98), ms(100), ms(2)));
}

TEST(Encoding, HexRoundTripAndErrors) {
  const Bytes b = {0x00, 0xab, 0xff};
  EXPECT_EQ(to_hex(b), "00abff");
  EXPECT_EQ(from_hex("00ABff"), b);
  EXPECT_THROW(from_hex("abc"), Error);
  EXPECT_THROW(from_hex("zz"), Error);
  EXPECT_THROW(Digest160::from_hex("00"), Error);
}

}  // namespace
}  // namespace l2ai
