#pragma once

#include "l2ai/digest.hpp"
#include "l2ai/encoding.hpp"
#include "l2ai/fuzzy_extractor.hpp"

namespace l2ai {

// Credential record persisted on the ledger. K_i is deliberately absent:
// the device recovers it as e_i XOR h(PWD_i || b_i).
struct SmartCard {
  static constexpr std::size_t kWireSize = 7 * Digest160::kSize + HelperData::kWireSize;

  Digest160 e_i;
  Digest160 f_i;
  Digest160 eid_i;
  Digest160 r_hms;
  Digest160 hid_hms;
  Digest160 ax_ui;
  HelperData tau;
  Digest160 card_uid;

  // Fields in declaration order, fixed width.
  Bytes serialize() const;
  static SmartCard parse(ByteView in);

  friend bool operator==(const SmartCard&, const SmartCard&) = default;
};

}  // namespace l2ai
