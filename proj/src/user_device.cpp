#include "l2ai/error.hpp"
#include "l2ai/hash.hpp"
#include "l2ai/protocol.hpp"

namespace l2ai {
namespace {

constexpr std::string_view kDeviceKeyDomain = "l2ai/device-key";

struct LocalCheck {
  Digest160 b;
  Digest160 pwd;
  Digest160 d_tid;
  Digest160 k;
  Digest160 f;
};

// Rebuild b, PWD, D_TID, K, F from the presented factors and compare F.
LocalCheck check_factors(const Credentials& creds, const SmartCard& card) {
  LocalCheck c;
  Digest160 sigma;
  try {
    sigma = fe_rep(creds.bio, card.tau);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RecoveryFailure) throw;
    throw Error(ErrorCode::LocalVerifyFailed, "biometric not recognised");
  }
  c.b = hash(sigma);
  c.pwd = hash_concat({as_bytes(creds.pw), c.b.view()});
  c.d_tid = xor_digest(creds.id, card.r_hms);
  c.k = xor_digest(card.e_i, hash_concat({c.pwd.view(), c.b.view()}));
  c.f = hash(xor_digest(xor_digest(c.pwd, c.k), c.b));
  if (c.f != card.f_i) throw Error(ErrorCode::LocalVerifyFailed, "F mismatch");
  return c;
}

}  // namespace

UserDevice::UserDevice(std::uint64_t device_seed, ClockHandle clock, Timestamp delta_t)
    : clock_(std::move(clock)),
      delta_t_(delta_t),
      rng_(device_seed),
      device_key_(detail::sha256_160({as_bytes(kDeviceKeyDomain), be64(device_seed)})) {}

std::pair<RegRequest, UserScratch> UserDevice::register_request(const Credentials& creds, const Token& token) {
  const FuzzyKey fk = fe_gen(creds.bio, rng_);

  UserScratch scratch;
  scratch.id = creds.id;
  scratch.tau = fk.tau;
  scratch.b = hash(fk.sigma);

  RegRequest req;
  req.x = hash(token.t_g);
  scratch.pwd = hash_concat({as_bytes(creds.pw), scratch.b.view()});
  req.pwd = scratch.pwd;
  req.did = xor_digest(creds.id, hash_concat({req.x.view(), token.t_g.view()}));
  return {req, scratch};
}

std::pair<SmartCard, BlockAddress> UserDevice::finalize_card(const ProvisionalCard& prov,
                                                             const UserScratch& scratch, Ledger& ledger) {
  SmartCard card;
  card.e_i = xor_digest(prov.k_i, hash_concat({scratch.pwd.view(), scratch.b.view()}));
  card.f_i = hash(xor_digest(xor_digest(scratch.pwd, prov.k_i), scratch.b));
  card.eid_i = prov.eid_i;
  card.r_hms = prov.r_hms;
  card.hid_hms = prov.hid_hms;
  card.ax_ui = prov.ax_ui;
  card.tau = scratch.tau;
  card.card_uid = prov.card_uid;

  const BlockAddress addr = ledger.put_card(card.card_uid, card);
  address_ = enc(device_key_, addr.serialize(), rng_);
  return {card, addr};
}

BlockAddress UserDevice::card_address() {
  if (!address_) throw Error(ErrorCode::NotFound, "device holds no card address");
  return BlockAddress::parse(dec(device_key_, *address_));
}

SmartCard UserDevice::load_card(const Ledger& ledger) { return ledger.get_card(card_address().card_uid); }

std::pair<Msg1, UserSession> UserDevice::login(const Credentials& creds, const SmartCard& card) {
  const LocalCheck c = check_factors(creds, card);

  UserSession s;
  s.b = c.b;
  s.pwd = c.pwd;
  s.d_tid = c.d_tid;
  s.k = c.k;
  s.f = c.f;
  s.t1 = clock_->now();
  s.c_i = xor_digest(c.k, c.pwd);
  s.h_ids = xor_digest(card.hid_hms, c.d_tid);
  s.w1 = hash_concat({c.d_tid.view(), s.h_ids.view()});
  s.m1 = hash_concat({s.c_i.view(), ts_bytes(s.t1), s.w1.view()});
  return {Msg1{s.t1, s.m1, card.eid_i, card.ax_ui}, s};
}

Digest160 UserDevice::verify(const UserSession& session, const Msg2& msg) {
  if (!is_fresh(clock_->now(), msg.t2, delta_t_)) throw Error(ErrorCode::Stale, "T2 outside freshness window");
  const Digest160 sk = xor_digest(msg.m2, session.w1);
  const Digest160 m3 = hash_concat({session.c_i.view(), ts_bytes(msg.t2), session.w1.view(), sk.view()});
  if (m3 != msg.m3) throw Error(ErrorCode::BadMac, "M3 mismatch");
  return sk;
}

SmartCard UserDevice::update_credentials(const Credentials& old_creds, const Credentials& new_creds,
                                         const SmartCard& card, Ledger& ledger) {
  if (new_creds.id != old_creds.id)
    throw Error(ErrorCode::LocalVerifyFailed, "identity cannot change through a credential update");
  const LocalCheck c = check_factors(old_creds, card);

  const FuzzyKey fk = fe_gen(new_creds.bio, rng_);
  const Digest160 b_new = hash(fk.sigma);
  const Digest160 pwd_new = hash_concat({as_bytes(new_creds.pw), b_new.view()});

  // K_i already folds in the registration PWD, so carrying it over unchanged
  // would break C_i = K_i ^ PWD at the next login. Re-key so C_i stays put.
  const Digest160 k_new = xor_digest(xor_digest(c.k, c.pwd), pwd_new);

  SmartCard updated = card;
  updated.e_i = xor_digest(k_new, hash_concat({pwd_new.view(), b_new.view()}));
  updated.f_i = hash(xor_digest(xor_digest(pwd_new, k_new), b_new));
  updated.tau = fk.tau;
  ledger.put_card(updated.card_uid, updated);
  return updated;
}

}  // namespace l2ai
