#pragma once

#include <cstdint>
#include <random>

#include "l2ai/digest.hpp"

namespace l2ai {

// Seeded generator. std::mt19937_64 has a fully specified output sequence,
// so every draw is reproducible across platforms. Distribution objects from
// <random> are not, which is why uniform() is hand-rolled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound); bound > 0.
  std::uint64_t uniform(std::uint64_t bound);

  template <std::size_t N>
  std::array<std::uint8_t, N> bytes() {
    std::array<std::uint8_t, N> out{};
    fill(out.data(), N);
    return out;
  }

  Digest160 digest() { return Digest160(bytes<Digest160::kSize>()); }

  void fill(std::uint8_t* out, std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace l2ai
