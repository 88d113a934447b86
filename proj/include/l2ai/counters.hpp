#pragma once

#include <cstdint>

namespace l2ai {

// Per-thread tally of primitive invocations. Only the counted entry points
// (hash, hash_concat, concat_mask, xor_digest, enc, dec, fe_gen, fe_rep)
// touch it; ledger chaining and key stretching inside the cipher and the
// fuzzy extractor are plumbing and stay uncounted.
struct OpCounters {
  std::uint64_t hash_count = 0;
  std::uint64_t xor_count = 0;
  std::uint64_t enc_count = 0;
  std::uint64_t dec_count = 0;
  std::uint64_t fe_count = 0;

  OpCounters& operator+=(const OpCounters& o) noexcept;
  friend OpCounters operator-(OpCounters a, const OpCounters& b) noexcept;
  friend bool operator==(const OpCounters&, const OpCounters&) = default;
};

OpCounters& op_counters() noexcept;
void reset_op_counters() noexcept;

}  // namespace l2ai
