#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "l2ai/authorization.hpp"
#include "l2ai/cipher.hpp"
#include "l2ai/clock.hpp"
#include "l2ai/digest.hpp"
#include "l2ai/fuzzy_extractor.hpp"
#include "l2ai/ledger.hpp"
#include "l2ai/messages.hpp"
#include "l2ai/rng.hpp"
#include "l2ai/smart_card.hpp"

namespace l2ai {

struct Credentials {
  Digest160 id;
  std::string pw;
  BioTemplate bio;
};

// Authorization token handed to the user out of band.
struct Token {
  Digest160 t_g;
  Role role = Role::Patient;
};

// Local state the device keeps between the registration request and card
// finalization. T_G is not kept.
struct UserScratch {
  Digest160 id;
  Digest160 b;
  Digest160 pwd;
  HelperData tau;
};

// Everything the device computed during login. Verifying Msg2 needs c_i and w1.
struct UserSession {
  Digest160 b;
  Digest160 pwd;
  Digest160 d_tid;
  Digest160 k;
  Digest160 f;
  Digest160 c_i;
  Digest160 h_ids;  // h(ID_HMS || S_HMS) as recovered from HID
  Digest160 w1;
  Digest160 m1;
  Timestamp t1;
};

// Server-side intermediate values of one authentication.
struct AuthTranscript {
  Digest160 d_tid;
  Digest160 t_g;
  Digest160 id;
  Role role = Role::Patient;
  Digest160 c_i;
  Digest160 w1;
  Digest160 m1;
  Digest160 n_s;
  Digest160 sk;
  Digest160 m2;
  Digest160 m3;
  Timestamp t1;
  Timestamp t2;
  Digest160 r2;
  Digest160 d_tid_new;
  Digest160 ax_new;
  Digest160 eid_new;
  Digest160 hid_new;
};

struct ServerConfig {
  Timestamp delta_t = kDefaultFreshnessWindow;
  PermissionTable permissions = PermissionTable::defaults();
};

// Hospital server. Also carries the SA duties (token issuance, authorization
// updates) and is the writer of the private ledger.
//
// h(S_HMS) and h(ID_HMS || S_HMS) are computed once at setup and reused by
// every registration and authentication.
class Server {
 public:
  Server(std::uint64_t seed, ClockHandle clock, ServerConfig config = {});

  const Digest160& id_hms() const noexcept { return id_hms_; }
  // S_HMS, exposed for audits and the reference oracle only.
  const Digest160& secret_key() const noexcept { return s_hms_; }
  Timestamp delta_t() const noexcept { return config_.delta_t; }
  const PermissionTable& permissions() const noexcept { return config_.permissions; }

  Ledger& ledger() noexcept { return ledger_; }
  const Ledger& ledger() const noexcept { return ledger_; }

  // Token issuance. Throws Error(InvalidRole) when the role has no permission entry.
  Token issue_token(std::string_view national_code, Role role);

  // Server half of registration. Throws Error(UnknownToken) or Error(AlreadyRegistered).
  ProvisionalCard register_user(const RegRequest& req);

  // Throws Error(Stale | UnknownPrincipal | Unauthorized | BadMac);
  // state is untouched on every rejection.
  std::pair<Msg2, AuthTranscript> authenticate(const Msg1& msg, std::string_view scope);

  // Fresh T_G for the identity, old token revoked, card AX replaced.
  // Keeps the current role unless one is given. Throws Error(NotFound).
  void update_authorization(const Digest160& id, std::optional<Role> new_role = std::nullopt);

  bool authorize(Role role, std::string_view scope, Timestamp at) const {
    return config_.permissions.allows(role, scope, at);
  }

  std::optional<Digest160> card_uid_for(const Digest160& id) const;
  std::size_t tokens_issued_to(std::string_view national_code) const;

 private:
  ServerConfig config_;
  ClockHandle clock_;
  Rng rng_;
  Digest160 id_hms_;
  Digest160 s_hms_;
  Digest160 h_s_;    // h(S_HMS)
  Digest160 h_ids_;  // h(ID_HMS || S_HMS)
  Ledger ledger_;
  std::unordered_map<Digest160, Digest160, Digest160Hash> card_of_id_;
  std::unordered_map<std::string, std::vector<Digest160>> issued_;  // national code -> X
};

// The user together with their smart gateway / mobile terminal.
class UserDevice {
 public:
  UserDevice(std::uint64_t device_seed, ClockHandle clock, Timestamp delta_t = kDefaultFreshnessWindow);

  // Builds {X, DID, PWD} and the helper data for the card.
  std::pair<RegRequest, UserScratch> register_request(const Credentials& creds, const Token& token);

  // Stores the card on the ledger and keeps its block address
  // encrypted under the device key.
  std::pair<SmartCard, BlockAddress> finalize_card(const ProvisionalCard& prov, const UserScratch& scratch,
                                                   Ledger& ledger);

  bool has_card() const noexcept { return address_.has_value(); }
  BlockAddress card_address();               // throws Error(NotFound)
  SmartCard load_card(const Ledger& ledger);  // latest live card for the stored address

  // Local factor check, then Msg1. Throws Error(LocalVerifyFailed).
  std::pair<Msg1, UserSession> login(const Credentials& creds, const SmartCard& card);

  // Checks Msg2 and returns SK. Throws Error(Stale | BadMac).
  Digest160 verify(const UserSession& session, const Msg2& msg);

  // Local password/biometric change. Throws Error(LocalVerifyFailed).
  SmartCard update_credentials(const Credentials& old_creds, const Credentials& new_creds,
                               const SmartCard& card, Ledger& ledger);

 private:
  ClockHandle clock_;
  Timestamp delta_t_;
  Rng rng_;
  Digest160 device_key_;
  std::optional<Ciphertext> address_;
};

}  // namespace l2ai
