#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "l2ai/authorization.hpp"
#include "l2ai/cipher.hpp"
#include "l2ai/digest.hpp"
#include "l2ai/smart_card.hpp"

namespace l2ai {

// X = h(T_G) and y = Enc_S(T_G). A later record with the same x and
// revoked = true retires the token.
struct TokenRecord {
  Digest160 x;
  Ciphertext y;
  Role role = Role::Patient;  // authorization group the SA assigned to T_G
  bool revoked = false;

  friend bool operator==(const TokenRecord&, const TokenRecord&) = default;
};

// h(D_TID) -> ID. A later record for the same h_dtid carrying superseded_by
// marks it replaced.
struct IdentityIndex {
  Digest160 h_dtid;
  Digest160 id;
  std::optional<Digest160> superseded_by;

  friend bool operator==(const IdentityIndex&, const IdentityIndex&) = default;
};

// Latest record per card_uid wins; supersedes_height points at the record it
// replaced.
struct CardRecord {
  Digest160 card_uid;
  SmartCard card;
  std::optional<std::uint64_t> supersedes_height;

  friend bool operator==(const CardRecord&, const CardRecord&) = default;
};

using Record = std::variant<TokenRecord, IdentityIndex, CardRecord>;

enum class RecordKind : std::uint8_t { Token = 1, Identity = 2, Card = 3 };

RecordKind kind_of(const Record& r) noexcept;
std::string_view kind_name(RecordKind kind) noexcept;

// Kind tag byte followed by fixed-width fields in declaration order; the
// ciphertext is length-prefixed.
Bytes serialize_record(const Record& r);
Record parse_record(ByteView payload);  // throws Error(ParseError)

struct LedgerBlock {
  std::uint64_t height = 0;
  Digest160 prev_digest;
  Bytes payload;
  Digest160 block_digest;

  friend bool operator==(const LedgerBlock&, const LedgerBlock&) = default;
};

struct BlockAddress {
  std::uint64_t height = 0;
  Digest160 card_uid;

  Bytes serialize() const;
  static BlockAddress parse(ByteView in);
  friend bool operator==(const BlockAddress&, const BlockAddress&) = default;
};

// h(height || prev_digest || payload), uncounted.
Digest160 compute_block_digest(std::uint64_t height, const Digest160& prev, ByteView payload);

// Checks heights, chaining, digests and that every payload decodes.
bool verify_chain(std::span<const LedgerBlock> blocks);

// Single-writer append-only hash chain. Lookups go through in-memory views
// rebuilt from the blocks; the blocks themselves are never rewritten.
class Ledger {
 public:
  BlockAddress append(const Record& record);

  // True iff x is a live TokenRecord.x or a live IdentityIndex.h_dtid.
  bool any_digest(const Digest160& x) const;

  std::optional<TokenRecord> live_token(const Digest160& x) const;
  void revoke_token(const Digest160& x);  // throws Error(NotFound)

  Digest160 get_identity(const Digest160& h_dtid) const;  // throws Error(NotFound)
  std::optional<Digest160> live_index_for(const Digest160& id) const;
  void replace_index(const Digest160& old_h, const Digest160& new_h, const Digest160& id);

  BlockAddress put_card(const Digest160& card_uid, const SmartCard& card);
  SmartCard get_card(const Digest160& card_uid) const;  // throws Error(NotFound)

  bool verify_chain() const { return l2ai::verify_chain(blocks_); }

  std::span<const LedgerBlock> blocks() const noexcept { return blocks_; }
  std::size_t size() const noexcept { return blocks_.size(); }
  const Record& record_at(std::uint64_t height) const { return records_.at(height); }

  // One block per line: height prev_digest kind payload block_digest (hex).
  std::vector<std::string> export_lines() const;
  void export_file(const std::filesystem::path& path) const;
  // Throws Error(ParseError) on malformed lines or a broken chain.
  static Ledger import_lines(std::span<const std::string> lines);
  static Ledger import_file(const std::filesystem::path& path);

 private:
  void index(std::uint64_t height, const Record& record);

  std::vector<LedgerBlock> blocks_;
  std::vector<Record> records_;
  std::unordered_map<Digest160, std::uint64_t, Digest160Hash> token_latest_;
  std::unordered_map<Digest160, std::uint64_t, Digest160Hash> identity_latest_;
  std::unordered_map<Digest160, Digest160, Digest160Hash> live_index_by_id_;
  std::unordered_map<Digest160, std::uint64_t, Digest160Hash> card_latest_;
};

}  // namespace l2ai
