#pragma once

#include "l2ai/clock.hpp"
#include "l2ai/digest.hpp"
#include "l2ai/encoding.hpp"

namespace l2ai {

// User -> server at registration: {X, DID_i, PWD_i}
struct RegRequest {
  static constexpr std::size_t kWireSize = 60;

  Digest160 x;
  Digest160 did;
  Digest160 pwd;

  Bytes encode() const;
  static RegRequest decode(ByteView in);
  friend bool operator==(const RegRequest&, const RegRequest&) = default;
};

// Server -> user at registration: {K_i, EID_i, HID_HMS, R1_HMS, AX_ui} plus the card identifier.
struct ProvisionalCard {
  static constexpr std::size_t kWireSize = 120;

  Digest160 k_i;
  Digest160 eid_i;
  Digest160 hid_hms;
  Digest160 r_hms;
  Digest160 ax_ui;
  Digest160 card_uid;

  Bytes encode() const;
  static ProvisionalCard decode(ByteView in);
  friend bool operator==(const ProvisionalCard&, const ProvisionalCard&) = default;
};

// MSG_1 = {T_1, M_1, EID_i, AX_ui}: 8-byte big-endian T_1 then three digests.
struct Msg1 {
  static constexpr std::size_t kWireSize = 68;

  Timestamp t1;
  Digest160 m1;
  Digest160 eid;
  Digest160 ax;

  Bytes encode() const;
  static Msg1 decode(ByteView in);
  friend bool operator==(const Msg1&, const Msg1&) = default;
};

// MSG_2 = {M_3, M_2, T_2}: two digests then 8-byte big-endian T_2.
struct Msg2 {
  static constexpr std::size_t kWireSize = 48;

  Digest160 m3;
  Digest160 m2;
  Timestamp t2;

  Bytes encode() const;
  static Msg2 decode(ByteView in);
  friend bool operator==(const Msg2&, const Msg2&) = default;
};

}  // namespace l2ai
