#pragma once

#include <optional>
#include <string>

#include "l2ai/hash.hpp"
#include "l2ai/protocol.hpp"

namespace l2ai::testing {

inline Credentials make_credentials(Rng& rng) {
  Credentials c;
  c.id = rng.digest();
  c.pw = "pw-" + rng.digest().hex().substr(0, 12);
  c.bio = BioTemplate::random(rng);
  return c;
}

// One server, one device, one registered user. Everything seeded from one value.
struct Deployment {
  explicit Deployment(std::uint64_t seed, Role role = Role::Doctor, ServerConfig cfg = {})
      : clock(make_clock()),
        server(seed, clock, std::move(cfg)),
        device(seed ^ 0x9E3779B97F4A7C15ULL, clock, server.delta_t()),
        rng(seed + 1) {
    creds = make_credentials(rng);
    token = server.issue_token("national-" + std::to_string(seed), role);
    auto [req, s] = device.register_request(creds, token);
    request = req;
    scratch = s;
    provisional = server.register_user(req);
    auto [c, a] = device.finalize_card(*provisional, *scratch, server.ledger());
    card = c;
    address = a;
  }

  SmartCard live_card() { return device.load_card(server.ledger()); }

  // Full login + authentication at the current clock with network delay.
  struct Session {
    Msg1 msg1;
    UserSession user;
    Msg2 msg2;
    AuthTranscript server;
    Digest160 sk_user;
  };

  Session run_session(std::string_view scope = "read-patient-vitals", std::uint64_t delay = 50) {
    Session s;
    auto [m1, us] = device.login(creds, live_card());
    s.msg1 = m1;
    s.user = us;
    clock->advance(delay);
    auto [m2, tr] = server.authenticate(m1, scope);
    s.msg2 = m2;
    s.server = tr;
    clock->advance(delay);
    s.sk_user = device.verify(us, m2);
    return s;
  }

  ClockHandle clock;
  Server server;
  UserDevice device;
  Rng rng;
  Credentials creds;
  Token token;
  std::optional<RegRequest> request;
  std::optional<UserScratch> scratch;
  std::optional<ProvisionalCard> provisional;
  SmartCard card;
  BlockAddress address;
};

}  // namespace l2ai::testing
