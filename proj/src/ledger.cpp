#include "l2ai/ledger.hpp"

#include <fstream>
#include <sstream>

#include "l2ai/error.hpp"
#include "l2ai/hash.hpp"

namespace l2ai {
namespace {

Digest160 read_digest(ByteReader& r) { return Digest160::from_bytes(r.take(Digest160::kSize)); }

bool read_flag(ByteReader& r) {
  const std::uint8_t f = r.u8();
  if (f > 1) throw Error(ErrorCode::ParseError, "bad flag byte");
  return f == 1;
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

RecordKind kind_of(const Record& r) noexcept {
  return std::visit(Overloaded{[](const TokenRecord&) { return RecordKind::Token; },
                               [](const IdentityIndex&) { return RecordKind::Identity; },
                               [](const CardRecord&) { return RecordKind::Card; }},
                    r);
}

std::string_view kind_name(RecordKind kind) noexcept {
  switch (kind) {
    case RecordKind::Token: return "token";
    case RecordKind::Identity: return "identity";
    case RecordKind::Card: return "card";
  }
  return "?";
}

Bytes serialize_record(const Record& r) {
  Bytes out;
  out.push_back(static_cast<std::uint8_t>(kind_of(r)));
  std::visit(Overloaded{
                 [&](const TokenRecord& t) {
                   append(out, t.x.view());
                   out.push_back(static_cast<std::uint8_t>(t.role));
                   out.push_back(t.revoked ? 1 : 0);
                   append(out, t.y.serialize());
                 },
                 [&](const IdentityIndex& i) {
                   append(out, i.h_dtid.view());
                   append(out, i.id.view());
                   out.push_back(i.superseded_by ? 1 : 0);
                   append(out, i.superseded_by.value_or(Digest160{}).view());
                 },
                 [&](const CardRecord& c) {
                   append(out, c.card_uid.view());
                   append(out, c.card.serialize());
                   out.push_back(c.supersedes_height ? 1 : 0);
                   append_be64(out, c.supersedes_height.value_or(0));
                 },
             },
             r);
  return out;
}

Record parse_record(ByteView payload) {
  ByteReader r(payload);
  const std::uint8_t tag = r.u8();
  switch (static_cast<RecordKind>(tag)) {
    case RecordKind::Token: {
      TokenRecord t;
      t.x = read_digest(r);
      try {
        t.role = role_from_byte(r.u8());
      } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, e.what());
      }
      t.revoked = read_flag(r);
      const auto rest = r.take(payload.size() - 1 - Digest160::kSize - 2);
      t.y = Ciphertext::parse(rest);
      r.expect_done();
      return t;
    }
    case RecordKind::Identity: {
      IdentityIndex i;
      i.h_dtid = read_digest(r);
      i.id = read_digest(r);
      const bool has = read_flag(r);
      const Digest160 s = read_digest(r);
      if (has) i.superseded_by = s;
      else if (!s.is_zero()) throw Error(ErrorCode::ParseError, "non-canonical identity record");
      r.expect_done();
      return i;
    }
    case RecordKind::Card: {
      CardRecord c;
      c.card_uid = read_digest(r);
      c.card = SmartCard::parse(r.take(SmartCard::kWireSize));
      const bool has = read_flag(r);
      const std::uint64_t h = r.be64();
      if (has) c.supersedes_height = h;
      else if (h != 0) throw Error(ErrorCode::ParseError, "non-canonical card record");
      r.expect_done();
      return c;
    }
  }
  throw Error(ErrorCode::ParseError, "unknown record kind " + std::to_string(tag));
}

Bytes BlockAddress::serialize() const {
  Bytes out;
  append_be64(out, height);
  append(out, card_uid.view());
  return out;
}

BlockAddress BlockAddress::parse(ByteView in) {
  ByteReader r(in);
  BlockAddress a;
  a.height = r.be64();
  a.card_uid = read_digest(r);
  r.expect_done();
  return a;
}

Digest160 compute_block_digest(std::uint64_t height, const Digest160& prev, ByteView payload) {
  return detail::sha256_160({be64(height), prev.view(), payload});
}

bool verify_chain(std::span<const LedgerBlock> blocks) {
  Digest160 prev{};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const LedgerBlock& b = blocks[i];
    if (b.height != i || b.prev_digest != prev) return false;
    if (compute_block_digest(b.height, b.prev_digest, b.payload) != b.block_digest) return false;
    try {
      (void)parse_record(b.payload);
    } catch (const Error&) {
      return false;
    }
    prev = b.block_digest;
  }
  return true;
}

BlockAddress Ledger::append(const Record& record) {
  if (const auto* idx = std::get_if<IdentityIndex>(&record); idx && !idx->superseded_by) {
    const auto live = live_index_by_id_.find(idx->id);
    if (live != live_index_by_id_.end() && live->second != idx->h_dtid)
      throw Error(ErrorCode::AlreadyRegistered, "identity already has a live index");
  }
  LedgerBlock block;
  block.height = blocks_.size();
  block.prev_digest = blocks_.empty() ? Digest160{} : blocks_.back().block_digest;
  block.payload = serialize_record(record);
  block.block_digest = compute_block_digest(block.height, block.prev_digest, block.payload);
  blocks_.push_back(std::move(block));
  records_.push_back(record);
  index(blocks_.back().height, record);

  BlockAddress addr{blocks_.back().height, Digest160{}};
  if (const auto* card = std::get_if<CardRecord>(&record)) addr.card_uid = card->card_uid;
  return addr;
}

void Ledger::index(std::uint64_t height, const Record& record) {
  std::visit(Overloaded{
                 [&](const TokenRecord& t) { token_latest_[t.x] = height; },
                 [&](const IdentityIndex& i) {
                   identity_latest_[i.h_dtid] = height;
                   if (i.superseded_by) {
                     const auto live = live_index_by_id_.find(i.id);
                     if (live != live_index_by_id_.end() && live->second == i.h_dtid) live_index_by_id_.erase(live);
                   } else {
                     live_index_by_id_[i.id] = i.h_dtid;
                   }
                 },
                 [&](const CardRecord& c) { card_latest_[c.card_uid] = height; },
             },
             record);
}

std::optional<TokenRecord> Ledger::live_token(const Digest160& x) const {
  const auto it = token_latest_.find(x);
  if (it == token_latest_.end()) return std::nullopt;
  const auto& t = std::get<TokenRecord>(records_[it->second]);
  if (t.revoked) return std::nullopt;
  return t;
}

bool Ledger::any_digest(const Digest160& x) const {
  if (live_token(x)) return true;
  const auto it = identity_latest_.find(x);
  return it != identity_latest_.end() && !std::get<IdentityIndex>(records_[it->second]).superseded_by;
}

void Ledger::revoke_token(const Digest160& x) {
  auto t = live_token(x);
  if (!t) throw Error(ErrorCode::NotFound, "no live token " + x.hex());
  t->revoked = true;
  append(*t);
}

Digest160 Ledger::get_identity(const Digest160& h_dtid) const {
  const auto it = identity_latest_.find(h_dtid);
  if (it == identity_latest_.end()) throw Error(ErrorCode::NotFound, "no identity index " + h_dtid.hex());
  const auto& idx = std::get<IdentityIndex>(records_[it->second]);
  if (idx.superseded_by) throw Error(ErrorCode::NotFound, "identity index superseded " + h_dtid.hex());
  return idx.id;
}

std::optional<Digest160> Ledger::live_index_for(const Digest160& id) const {
  const auto it = live_index_by_id_.find(id);
  if (it == live_index_by_id_.end()) return std::nullopt;
  return it->second;
}

void Ledger::replace_index(const Digest160& old_h, const Digest160& new_h, const Digest160& id) {
  const auto live = live_index_for(id);
  if (!live || *live != old_h) throw Error(ErrorCode::NotFound, "no live index " + old_h.hex() + " for id");
  append(IdentityIndex{old_h, id, new_h});
  append(IdentityIndex{new_h, id, std::nullopt});
}

BlockAddress Ledger::put_card(const Digest160& card_uid, const SmartCard& card) {
  CardRecord rec{card_uid, card, std::nullopt};
  if (const auto it = card_latest_.find(card_uid); it != card_latest_.end()) rec.supersedes_height = it->second;
  return append(rec);
}

SmartCard Ledger::get_card(const Digest160& card_uid) const {
  const auto it = card_latest_.find(card_uid);
  if (it == card_latest_.end()) throw Error(ErrorCode::NotFound, "no card " + card_uid.hex());
  return std::get<CardRecord>(records_[it->second]).card;
}

std::vector<std::string> Ledger::export_lines() const {
  std::vector<std::string> lines;
  lines.reserve(blocks_.size());
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const LedgerBlock& b = blocks_[i];
    std::string line = std::to_string(b.height);
    line += ' ';
    line += b.prev_digest.hex();
    line += ' ';
    line += kind_name(kind_of(records_[i]));
    line += ' ';
    line += to_hex(b.payload);
    line += ' ';
    line += b.block_digest.hex();
    lines.push_back(std::move(line));
  }
  return lines;
}

void Ledger::export_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  for (const auto& line : export_lines()) out << line << '\n';
  if (!out) throw Error(ErrorCode::IOError, "write failed for " + path.string());
}

Ledger Ledger::import_lines(std::span<const std::string> lines) {
  std::vector<LedgerBlock> blocks;
  std::vector<Record> records;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const std::string where = "ledger line " + std::to_string(n + 1);
    std::istringstream fields(lines[n]);
    std::string height, prev, kind, payload, digest, extra;
    if (!(fields >> height >> prev >> kind >> payload >> digest) || (fields >> extra))
      throw Error(ErrorCode::ParseError, where + ": expected 5 fields");
    LedgerBlock b;
    try {
      b.height = std::stoull(height);
      b.prev_digest = Digest160::from_hex(prev);
      b.payload = from_hex(payload);
      b.block_digest = Digest160::from_hex(digest);
      records.push_back(parse_record(b.payload));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
    if (kind_name(kind_of(records.back())) != kind) throw Error(ErrorCode::ParseError, where + ": kind mismatch");
    blocks.push_back(std::move(b));
  }
  if (!l2ai::verify_chain(blocks)) throw Error(ErrorCode::ParseError, "imported chain fails verification");

  Ledger ledger;
  ledger.blocks_ = std::move(blocks);
  ledger.records_ = std::move(records);
  for (std::size_t i = 0; i < ledger.records_.size(); ++i) ledger.index(i, ledger.records_[i]);
  return ledger;
}

Ledger Ledger::import_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot read " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return import_lines(lines);
}

}  // namespace l2ai
