#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace l2ai {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);

// Throws Error(ParseError) on odd length or a non-hex character.
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::array<std::uint8_t, 8> be64(std::uint64_t v) noexcept;
std::uint64_t read_be64(ByteView in) noexcept;  // reads in[0..8)

inline void append(Bytes& out, ByteView in) { out.insert(out.end(), in.begin(), in.end()); }

void append_be64(Bytes& out, std::uint64_t v);
void append_be32(Bytes& out, std::uint32_t v);

// Bounds-checked sequential reader over a byte buffer. Every read throws
// Error(ParseError) when the buffer is exhausted.
class ByteReader {
 public:
  explicit ByteReader(ByteView in) noexcept : in_(in) {}

  ByteView take(std::size_t n);
  std::uint8_t u8();
  std::uint32_t be32();
  std::uint64_t be64();
  bool done() const noexcept { return pos_ == in_.size(); }
  void expect_done() const;

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace l2ai
