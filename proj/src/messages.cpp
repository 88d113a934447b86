#include "l2ai/messages.hpp"

#include "l2ai/error.hpp"
#include "l2ai/smart_card.hpp"

namespace l2ai {
namespace {

void check_size(ByteView in, std::size_t want, const char* what) {
  if (in.size() != want)
    throw Error(ErrorCode::ParseError, std::string(what) + ": expected " + std::to_string(want) +
                                           " bytes, got " + std::to_string(in.size()));
}

Digest160 read_digest(ByteReader& r) { return Digest160::from_bytes(r.take(Digest160::kSize)); }

}  // namespace

Bytes RegRequest::encode() const {
  Bytes out;
  out.reserve(kWireSize);
  append(out, x.view());
  append(out, did.view());
  append(out, pwd.view());
  return out;
}

RegRequest RegRequest::decode(ByteView in) {
  check_size(in, kWireSize, "RegRequest");
  ByteReader r(in);
  RegRequest m;
  m.x = read_digest(r);
  m.did = read_digest(r);
  m.pwd = read_digest(r);
  return m;
}

Bytes ProvisionalCard::encode() const {
  Bytes out;
  out.reserve(kWireSize);
  for (const Digest160* d : {&k_i, &eid_i, &hid_hms, &r_hms, &ax_ui, &card_uid}) append(out, d->view());
  return out;
}

ProvisionalCard ProvisionalCard::decode(ByteView in) {
  check_size(in, kWireSize, "ProvisionalCard");
  ByteReader r(in);
  ProvisionalCard c;
  for (Digest160* d : {&c.k_i, &c.eid_i, &c.hid_hms, &c.r_hms, &c.ax_ui, &c.card_uid}) *d = read_digest(r);
  return c;
}

Bytes Msg1::encode() const {
  Bytes out;
  out.reserve(kWireSize);
  append_be64(out, t1.millis);
  append(out, m1.view());
  append(out, eid.view());
  append(out, ax.view());
  return out;
}

Msg1 Msg1::decode(ByteView in) {
  check_size(in, kWireSize, "Msg1");
  ByteReader r(in);
  Msg1 m;
  m.t1 = Timestamp{r.be64()};
  m.m1 = read_digest(r);
  m.eid = read_digest(r);
  m.ax = read_digest(r);
  return m;
}

Bytes Msg2::encode() const {
  Bytes out;
  out.reserve(kWireSize);
  append(out, m3.view());
  append(out, m2.view());
  append_be64(out, t2.millis);
  return out;
}

Msg2 Msg2::decode(ByteView in) {
  check_size(in, kWireSize, "Msg2");
  ByteReader r(in);
  Msg2 m;
  m.m3 = read_digest(r);
  m.m2 = read_digest(r);
  m.t2 = Timestamp{r.be64()};
  return m;
}

Bytes SmartCard::serialize() const {
  Bytes out;
  out.reserve(kWireSize);
  for (const Digest160* d : {&e_i, &f_i, &eid_i, &r_hms, &hid_hms, &ax_ui}) append(out, d->view());
  append(out, tau.serialize());
  append(out, card_uid.view());
  return out;
}

SmartCard SmartCard::parse(ByteView in) {
  check_size(in, kWireSize, "SmartCard");
  ByteReader r(in);
  SmartCard c;
  for (Digest160* d : {&c.e_i, &c.f_i, &c.eid_i, &c.r_hms, &c.hid_hms, &c.ax_ui}) *d = read_digest(r);
  c.tau = HelperData::parse(r.take(HelperData::kWireSize));
  c.card_uid = read_digest(r);
  return c;
}

}  // namespace l2ai
