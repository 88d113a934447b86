#include "l2ai/error.hpp"
#include "l2ai/hash.hpp"
#include "l2ai/protocol.hpp"

namespace l2ai {

Server::Server(std::uint64_t seed, ClockHandle clock, ServerConfig config)
    : config_(std::move(config)), clock_(std::move(clock)), rng_(seed) {
  id_hms_ = rng_.digest();
  s_hms_ = rng_.digest();
  h_s_ = hash(s_hms_);
  h_ids_ = hash_concat({id_hms_.view(), s_hms_.view()});
}

Token Server::issue_token(std::string_view national_code, Role role) {
  if (!config_.permissions.has_role(role))
    throw Error(ErrorCode::InvalidRole, "no permission entry for " + std::string(role_code(role)));
  if (national_code.empty()) throw Error(ErrorCode::InvalidRole, "empty national code");

  Token token{rng_.digest(), role};
  const Digest160 x = hash(token.t_g);                        // X = h(T_G)
  const Ciphertext y = enc(s_hms_, token.t_g.view(), rng_);  // y = Enc_S(T_G)
  ledger_.append(TokenRecord{x, y, role, false});
  issued_[std::string(national_code)].push_back(x);
  return token;
}

ProvisionalCard Server::register_user(const RegRequest& req) {
  if (!ledger_.any_digest(req.x)) throw Error(ErrorCode::UnknownToken, "X not on ledger");
  const auto token = ledger_.live_token(req.x);
  if (!token) throw Error(ErrorCode::UnknownToken, "X is not a live token");

  const Digest160 t_g = Digest160::from_bytes(dec(s_hms_, token->y));
  const Digest160 id = xor_digest(req.did, hash_concat({req.x.view(), t_g.view()}));
  if (ledger_.live_index_for(id)) throw Error(ErrorCode::AlreadyRegistered, "identity already registered");

  const Digest160 r1 = rng_.digest();
  const Digest160 d_tid = xor_digest(id, r1);

  ProvisionalCard card;
  card.r_hms = r1;
  card.ax_ui = xor_digest(t_g, concat_mask(d_tid, id_hms_));
  card.k_i = xor_digest(hash_concat({s_hms_.view(), id.view()}), req.pwd);
  card.eid_i = xor_digest(d_tid, h_s_);
  card.hid_hms = xor_digest(h_ids_, d_tid);
  card.card_uid = rng_.digest();

  ledger_.append(IdentityIndex{hash(d_tid), id, std::nullopt});
  card_of_id_[id] = card.card_uid;
  return card;
}

std::pair<Msg2, AuthTranscript> Server::authenticate(const Msg1& msg, std::string_view scope) {
  const Timestamp now = clock_->now();
  if (!is_fresh(now, msg.t1, config_.delta_t))
    throw Error(ErrorCode::Stale, "T1 outside freshness window");

  AuthTranscript tr;
  tr.t1 = msg.t1;
  tr.d_tid = xor_digest(msg.eid, h_s_);
  tr.t_g = xor_digest(msg.ax, concat_mask(tr.d_tid, id_hms_));

  const Digest160 h_dtid = hash(tr.d_tid);
  const Digest160 x = hash(tr.t_g);
  if (!ledger_.any_digest(h_dtid) || !ledger_.any_digest(x))
    throw Error(ErrorCode::UnknownPrincipal, "pseudo-identity or token not live");
  const auto token = ledger_.live_token(x);
  if (!token) throw Error(ErrorCode::UnknownPrincipal, "token not live");
  tr.role = token->role;

  if (!authorize(tr.role, scope, now))
    throw Error(ErrorCode::Unauthorized,
                std::string(role_code(tr.role)) + " may not use scope '" + std::string(scope) + "'");

  try {
    tr.id = ledger_.get_identity(h_dtid);
  } catch (const Error&) {
    throw Error(ErrorCode::UnknownPrincipal, "no live identity for pseudo-identity");
  }
  const auto uid = card_uid_for(tr.id);
  if (!uid) throw Error(ErrorCode::UnknownPrincipal, "no card for identity");

  tr.c_i = hash_concat({s_hms_.view(), tr.id.view()});
  tr.w1 = hash_concat({tr.d_tid.view(), h_ids_.view()});
  tr.m1 = hash_concat({tr.c_i.view(), ts_bytes(msg.t1), tr.w1.view()});
  if (tr.m1 != msg.m1) throw Error(ErrorCode::BadMac, "M1 mismatch");

  tr.n_s = rng_.digest();
  tr.t2 = now;
  tr.sk = hash_concat({tr.w1.view(), tr.n_s.view()});
  tr.m2 = xor_digest(tr.sk, tr.w1);
  tr.m3 = hash_concat({tr.c_i.view(), ts_bytes(tr.t2), tr.w1.view(), tr.sk.view()});

  // Fresh pseudo-identity for the next session.
  tr.r2 = rng_.digest();
  tr.d_tid_new = xor_digest(tr.id, tr.r2);
  tr.ax_new = xor_digest(tr.t_g, concat_mask(tr.d_tid_new, id_hms_));
  tr.eid_new = xor_digest(tr.d_tid_new, h_s_);
  tr.hid_new = xor_digest(h_ids_, tr.d_tid_new);

  SmartCard card = ledger_.get_card(*uid);
  card.r_hms = tr.r2;
  card.eid_i = tr.eid_new;
  card.ax_ui = tr.ax_new;
  card.hid_hms = tr.hid_new;
  ledger_.put_card(*uid, card);
  ledger_.replace_index(h_dtid, hash(tr.d_tid_new), tr.id);

  return {Msg2{tr.m3, tr.m2, tr.t2}, tr};
}

void Server::update_authorization(const Digest160& id, std::optional<Role> new_role) {
  if (!ledger_.live_index_for(id)) throw Error(ErrorCode::NotFound, "no live identity index");
  const auto uid = card_uid_for(id);
  if (!uid) throw Error(ErrorCode::NotFound, "no card for identity");
  SmartCard card = ledger_.get_card(*uid);

  const Digest160 d_tid = xor_digest(card.eid_i, h_s_);
  const Digest160 mask = concat_mask(d_tid, id_hms_);
  const Digest160 x_old = hash(xor_digest(card.ax_ui, mask));
  const auto old_token = ledger_.live_token(x_old);
  if (!old_token && !new_role) throw Error(ErrorCode::NotFound, "current token not live and no role given");
  const Role role = new_role.value_or(old_token ? old_token->role : Role::Patient);
  if (!config_.permissions.has_role(role))
    throw Error(ErrorCode::InvalidRole, "no permission entry for " + std::string(role_code(role)));

  const Digest160 t_new = rng_.digest();
  const Digest160 x_new = hash(t_new);
  card.ax_ui = xor_digest(t_new, mask);

  ledger_.append(TokenRecord{x_new, enc(s_hms_, t_new.view(), rng_), role, false});
  if (old_token) ledger_.revoke_token(x_old);
  ledger_.put_card(*uid, card);
}

std::optional<Digest160> Server::card_uid_for(const Digest160& id) const {
  const auto it = card_of_id_.find(id);
  if (it == card_of_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Server::tokens_issued_to(std::string_view national_code) const {
  const auto it = issued_.find(std::string(national_code));
  return it == issued_.end() ? 0 : it->second.size();
}

}  // namespace l2ai
