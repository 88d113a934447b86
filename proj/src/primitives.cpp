#include <openssl/evp.h>

#include <algorithm>
#include <memory>

#include "l2ai/cipher.hpp"
#include "l2ai/counters.hpp"
#include "l2ai/digest.hpp"
#include "l2ai/error.hpp"
#include "l2ai/hash.hpp"
#include "l2ai/rng.hpp"

namespace l2ai {

// ---- counters ---------------------------------------------------------------

OpCounters& OpCounters::operator+=(const OpCounters& o) noexcept {
  hash_count += o.hash_count;
  xor_count += o.xor_count;
  enc_count += o.enc_count;
  dec_count += o.dec_count;
  fe_count += o.fe_count;
  return *this;
}

OpCounters operator-(OpCounters a, const OpCounters& b) noexcept {
  a.hash_count -= b.hash_count;
  a.xor_count -= b.xor_count;
  a.enc_count -= b.enc_count;
  a.dec_count -= b.dec_count;
  a.fe_count -= b.fe_count;
  return a;
}

OpCounters& op_counters() noexcept {
  thread_local OpCounters counters;
  return counters;
}

void reset_op_counters() noexcept { op_counters() = OpCounters{}; }

// ---- digest -----------------------------------------------------------------

Digest160 Digest160::from_bytes(ByteView bytes) {
  if (bytes.size() != kSize) throw Error(ErrorCode::ParseError, "digest must be 20 bytes");
  Array a{};
  std::copy(bytes.begin(), bytes.end(), a.begin());
  return Digest160(a);
}

Digest160 Digest160::from_hex(std::string_view hex) { return from_bytes(l2ai::from_hex(hex)); }

bool Digest160::is_zero() const noexcept {
  return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

// ---- rng --------------------------------------------------------------------

std::uint64_t Rng::uniform(std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v = 0;
  do {
    v = engine_();
  } while (v >= limit);
  return v % bound;
}

void Rng::fill(std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  while (i < n) {
    std::uint64_t word = engine_();
    for (int k = 0; k < 8 && i < n; ++k, ++i) {
      out[i] = static_cast<std::uint8_t>(word >> 56);
      word <<= 8;
    }
  }
}

// ---- hash -------------------------------------------------------------------

namespace detail {

std::array<std::uint8_t, 32> sha256(std::initializer_list<ByteView> parts) {
  struct MdDeleter {
    void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
  };
  thread_local std::unique_ptr<EVP_MD_CTX, MdDeleter> ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("openssl failure in DigestInit");
  for (ByteView p : parts) {
    if (!p.empty() && EVP_DigestUpdate(ctx.get(), p.data(), p.size()) != 1)
      throw std::runtime_error("openssl failure in DigestUpdate");
  }
  std::array<std::uint8_t, 32> out{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size())
    throw std::runtime_error("openssl failure in DigestFinal");
  return out;
}

Digest160 sha256_160(std::initializer_list<ByteView> parts) {
  const auto full = sha256(parts);
  Digest160::Array a{};
  std::copy_n(full.begin(), Digest160::kSize, a.begin());
  return Digest160(a);
}

}  // namespace detail

Digest160 hash(ByteView data) {
  ++op_counters().hash_count;
  return detail::sha256_160({data});
}

Digest160 hash_concat(std::initializer_list<ByteView> parts) {
  ++op_counters().hash_count;
  return detail::sha256_160(parts);
}

Digest160 xor_digest(const Digest160& a, const Digest160& b) {
  ++op_counters().xor_count;
  Digest160::Array out{};
  for (std::size_t i = 0; i < Digest160::kSize; ++i) out[i] = a.bytes()[i] ^ b.bytes()[i];
  return Digest160(out);
}

Digest160 concat_mask(const Digest160& a, const Digest160& b) {
  return hash_concat({a.view(), b.view()});
}

// ---- cipher -----------------------------------------------------------------

namespace {

constexpr std::string_view kEncDomain = "l2ai/enc/v1";

struct CtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const noexcept { EVP_CIPHER_CTX_free(ctx); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

CipherCtx new_ctx() {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::bad_alloc();
  return ctx;
}

std::array<std::uint8_t, 32> stretch_key(const Digest160& key) {
  return detail::sha256({as_bytes(kEncDomain), key.view()});
}

[[noreturn]] void openssl_failure(const char* where) {
  throw std::runtime_error(std::string("openssl failure in ") + where);
}

}  // namespace

Bytes Ciphertext::serialize() const {
  Bytes out;
  out.reserve(4 + kNonceSize + body.size() + kTagSize);
  append_be32(out, static_cast<std::uint32_t>(body.size()));
  append(out, nonce);
  append(out, body);
  append(out, tag);
  return out;
}

Ciphertext Ciphertext::parse(ByteView in) {
  ByteReader r(in);
  Ciphertext ct;
  const std::uint32_t len = r.be32();
  ByteView n = r.take(kNonceSize);
  std::copy(n.begin(), n.end(), ct.nonce.begin());
  ByteView b = r.take(len);
  ct.body.assign(b.begin(), b.end());
  ByteView t = r.take(kTagSize);
  std::copy(t.begin(), t.end(), ct.tag.begin());
  r.expect_done();
  return ct;
}

Ciphertext enc(const Digest160& key, ByteView plaintext, Rng& rng) {
  ++op_counters().enc_count;
  Ciphertext ct;
  ct.nonce = rng.bytes<Ciphertext::kNonceSize>();
  ct.body.resize(plaintext.size());
  const auto k = stretch_key(key);

  CipherCtx ctx = new_ctx();
  int len = 0;
  if (EVP_EncryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, k.data(), ct.nonce.data()) != 1)
    openssl_failure("EncryptInit");
  if (!plaintext.empty() &&
      EVP_EncryptUpdate(ctx.get(), ct.body.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1)
    openssl_failure("EncryptUpdate");
  if (EVP_EncryptFinal_ex(ctx.get(), ct.body.data() + len, &len) != 1) openssl_failure("EncryptFinal");
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, Ciphertext::kTagSize, ct.tag.data()) != 1)
    openssl_failure("GET_TAG");
  return ct;
}

Bytes dec(const Digest160& key, const Ciphertext& ct) {
  ++op_counters().dec_count;
  Bytes out(ct.body.size());
  const auto k = stretch_key(key);

  CipherCtx ctx = new_ctx();
  int len = 0;
  if (EVP_DecryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, k.data(), ct.nonce.data()) != 1)
    openssl_failure("DecryptInit");
  if (!ct.body.empty() &&
      EVP_DecryptUpdate(ctx.get(), out.data(), &len, ct.body.data(), static_cast<int>(ct.body.size())) != 1)
    openssl_failure("DecryptUpdate");
  auto tag = ct.tag;
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, Ciphertext::kTagSize, tag.data()) != 1)
    openssl_failure("SET_TAG");
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &len) != 1)
    throw Error(ErrorCode::AuthFailure, "ciphertext failed authentication");
  return out;
}

}  // namespace l2ai
