#include "l2ai/simulation.hpp"

#include <algorithm>

namespace l2ai {

std::string_view phase_name(Phase p) noexcept {
  switch (p) {
    case Phase::Setup: return "Setup";
    case Phase::Registration: return "Registration";
    case Phase::Login: return "Login";
    case Phase::AuthKeyExchange: return "AuthKeyExchange";
    case Phase::CredUpdate: return "CredUpdate";
    case Phase::AuthzUpdate: return "AuthzUpdate";
  }
  return "?";
}

std::string_view side_name(Side s) noexcept { return s == Side::User ? "User" : "Server"; }

std::string PhaseMetrics::to_line() const {
  return "metric " + std::string(phase_name(phase)) + ' ' + std::string(side_name(side)) +
         " hash=" + std::to_string(ops.hash_count) + " xor=" + std::to_string(ops.xor_count) +
         " enc=" + std::to_string(ops.enc_count) + " dec=" + std::to_string(ops.dec_count) +
         " fe=" + std::to_string(ops.fe_count) + " bytes=" + std::to_string(bytes_sent);
}

MetricsBook::Scope::Scope(MetricsBook& book, Phase phase, Side side)
    : book_(book), slot_(book.slot(phase, side)), start_(op_counters()) {}

MetricsBook::Scope::~Scope() { slot_.ops += op_counters() - start_; }

PhaseMetrics& MetricsBook::slot(Phase phase, Side side) {
  auto [it, fresh] = slots_.try_emplace({phase, side});
  if (fresh) {
    it->second.phase = phase;
    it->second.side = side;
  }
  return it->second;
}

std::vector<PhaseMetrics> MetricsBook::list() const {
  std::vector<PhaseMetrics> out;
  for (const auto& [key, m] : slots_) out.push_back(m);
  return out;
}

const PhaseMetrics* MetricsBook::find(Phase phase, Side side) const {
  const auto it = slots_.find({phase, side});
  return it == slots_.end() ? nullptr : &it->second;
}

OpCounters MetricsBook::total() const {
  OpCounters sum;
  for (const auto& [key, m] : slots_) sum += m.ops;
  return sum;
}

Simulation::Simulation(SimConfig config)
    : config_(std::move(config)),
      clock_(make_clock()),
      baseline_(op_counters()),
      rng_(config_.seed ^ 0x5DEECE66DULL),
      server_([this] {
        auto scope = metrics_.scope(Phase::Setup, Side::Server);
        return Server(config_.seed, clock_, config_.server);
      }()),
      channel_(clock_, config_.base_delay) {
  channel_.attach(std::string(kServerEntity), [this](const Envelope& env) { on_server(env); });
}

void Simulation::add_user(const std::string& name, Role role) {
  if (name == kServerEntity || name == "adversary" || users_.count(name))
    throw Error(ErrorCode::ConfigError, "duplicate or reserved entity name '" + name + "'");
  User u;
  u.name = name;
  u.role = role;
  u.creds.id = rng_.digest();
  u.creds.pw = "pw-" + rng_.digest().hex().substr(0, 16);
  u.creds.bio = BioTemplate::random(rng_);
  u.device = std::make_unique<UserDevice>(rng_.next(), clock_, server_.delta_t());
  auto [it, ok] = users_.emplace(name, std::move(u));
  User* self = &it->second;
  channel_.attach(name, [this, self](const Envelope& env) { on_user(*self, env); });
}

Simulation::User& Simulation::user(const std::string& name) {
  const auto it = users_.find(name);
  if (it == users_.end()) throw Error(ErrorCode::UnknownPrincipal, "no user '" + name + "'");
  return it->second;
}

Credentials Simulation::noisy(const User& u) const {
  Credentials c = u.creds;
  // Spread flips round-robin over the code blocks: the first 2*blocks flips
  // stay within tolerance, the next one does not.
  for (std::size_t k = 0; k < u.noise; ++k) {
    const std::size_t block = k % kCodeBlocks;
    const std::size_t pos = k / kCodeBlocks;
    if (pos >= kRepetition) break;
    c.bio.flip(block * kRepetition + pos);
  }
  return c;
}

void Simulation::outcome(const EntityId& entity, std::string op, const Envelope* env,
                         std::optional<ErrorCode> err) {
  Outcome o;
  o.at = clock_->now();
  o.entity = entity;
  o.op = op;
  o.ok = !err;
  o.code = err;
  if (env) {
    o.seq = env->seq;
    o.replayed = env->replayed;
  }
  channel_.record(err ? EventType::Reject : EventType::Accept, entity, std::move(op),
                  err ? std::string(to_string(*err)) : std::string(), o.seq);
  outcomes_.push_back(std::move(o));
}

void Simulation::register_user(const std::string& name) {
  User& u = user(name);
  try {
    {
      auto scope = metrics_.scope(Phase::Registration, Side::Server);
      u.token = server_.issue_token("nc-" + name, u.role);
    }
    RegRequest req;
    {
      auto scope = metrics_.scope(Phase::Registration, Side::User);
      auto [r, s] = u.device->register_request(u.creds, *u.token);
      req = r;
      u.scratch = s;
    }
    metrics_.add_bytes(Phase::Registration, Side::User, RegRequest::kWireSize);
    channel_.send(name, std::string(kServerEntity), "reg-request", req.encode(), {}, true);
  } catch (const Error& e) {
    outcome(name, "register", nullptr, e.code());
  }
  channel_.step();
}

void Simulation::login(const std::string& name, std::optional<std::string> scope) {
  User& u = user(name);
  u.keys = {};
  u.session.reset();
  const std::string s = scope.value_or(server_.permissions().default_scope(u.role).value_or(""));
  try {
    Msg1 m1;
    {
      auto guard = metrics_.scope(Phase::Login, Side::User);
      const SmartCard card = u.device->load_card(server_.ledger());
      auto [msg, session] = u.device->login(noisy(u), card);
      m1 = msg;
      u.session = session;
    }
    metrics_.add_bytes(Phase::Login, Side::User, Msg1::kWireSize);
    channel_.send(name, std::string(kServerEntity), "msg1", m1.encode(), s);
  } catch (const Error& e) {
    outcome(name, "login", nullptr, e.code());
  }
  channel_.step();
}

void Simulation::update_credentials(const std::string& name) {
  User& u = user(name);
  Credentials fresh;
  fresh.id = u.creds.id;
  fresh.pw = "pw-" + rng_.digest().hex().substr(0, 16);
  fresh.bio = BioTemplate::random(rng_);
  try {
    auto scope = metrics_.scope(Phase::CredUpdate, Side::User);
    u.device->update_credentials(noisy(u), fresh, u.device->load_card(server_.ledger()), server_.ledger());
    u.creds = fresh;
    outcome(name, "update-creds", nullptr, std::nullopt);
  } catch (const Error& e) {
    outcome(name, "update-creds", nullptr, e.code());
  }
}

void Simulation::update_authorization(const std::string& name, std::optional<Role> role) {
  User& u = user(name);
  try {
    auto scope = metrics_.scope(Phase::AuthzUpdate, Side::Server);
    server_.update_authorization(u.creds.id, role);
    if (role) u.role = *role;
    outcome(std::string(kServerEntity), "update-authz", nullptr, std::nullopt);
  } catch (const Error& e) {
    outcome(std::string(kServerEntity), "update-authz", nullptr, e.code());
  }
}

void Simulation::advance(std::uint64_t millis) {
  clock_->advance(millis);
  channel_.step();
}

void Simulation::set_noise(const std::string& name, std::size_t flips) { user(name).noise = flips; }

Simulation::SessionKeys Simulation::last_keys(const std::string& name) const {
  const auto it = users_.find(name);
  if (it == users_.end()) throw Error(ErrorCode::UnknownPrincipal, "no user '" + name + "'");
  return it->second.keys;
}

std::size_t Simulation::accepted_authentications() const {
  return static_cast<std::size_t>(std::count_if(outcomes_.begin(), outcomes_.end(), [](const Outcome& o) {
    return o.ok && o.op == "authenticate";
  }));
}

void Simulation::on_server(const Envelope& env) {
  const EntityId self(kServerEntity);
  try {
    if (env.kind == "reg-request") {
      ProvisionalCard prov;
      {
        auto scope = metrics_.scope(Phase::Registration, Side::Server);
        prov = server_.register_user(RegRequest::decode(env.payload));
      }
      outcome(self, "register", &env, std::nullopt);
      metrics_.add_bytes(Phase::Registration, Side::Server, ProvisionalCard::kWireSize);
      channel_.send(self, env.from, "reg-card", prov.encode(), {}, true);
    } else if (env.kind == "msg1") {
      std::pair<Msg2, AuthTranscript> result;
      {
        auto scope = metrics_.scope(Phase::AuthKeyExchange, Side::Server);
        result = server_.authenticate(Msg1::decode(env.payload), env.context);
      }
      if (const auto it = users_.find(env.from); it != users_.end()) it->second.keys.server = result.second.sk;
      outcome(self, "authenticate", &env, std::nullopt);
      metrics_.add_bytes(Phase::AuthKeyExchange, Side::Server, Msg2::kWireSize);
      channel_.send(self, env.from, "msg2", result.first.encode());
    } else {
      outcome(self, env.kind, &env, ErrorCode::ParseError);
    }
  } catch (const Error& e) {
    outcome(self, env.kind == "msg1" ? "authenticate" : "register", &env, e.code());
  }
}

void Simulation::on_user(User& u, const Envelope& env) {
  try {
    if (env.kind == "reg-card") {
      if (!u.scratch) throw Error(ErrorCode::NoSession, "no registration in progress");
      {
        auto scope = metrics_.scope(Phase::Registration, Side::User);
        u.device->finalize_card(ProvisionalCard::decode(env.payload), *u.scratch, server_.ledger());
      }
      u.scratch.reset();
      outcome(u.name, "register", &env, std::nullopt);
    } else if (env.kind == "msg2") {
      if (!u.session) throw Error(ErrorCode::NoSession, "no login in progress");
      Digest160 sk;
      {
        auto scope = metrics_.scope(Phase::AuthKeyExchange, Side::User);
        sk = u.device->verify(*u.session, Msg2::decode(env.payload));
      }
      u.keys.user = sk;
      u.session.reset();
      outcome(u.name, "verify", &env, std::nullopt);
    } else {
      outcome(u.name, env.kind, &env, ErrorCode::ParseError);
    }
  } catch (const Error& e) {
    outcome(u.name, env.kind == "msg2" ? "verify" : "register", &env, e.code());
  }
}

bool Simulation::secret_exposed() const {
  const auto& secret = server_.secret_key().bytes();
  auto contains = [&](const Bytes& hay) {
    return std::search(hay.begin(), hay.end(), secret.begin(), secret.end()) != hay.end();
  };
  for (const Bytes& b : channel_.wire())
    if (contains(b)) return true;
  for (const LedgerBlock& b : server_.ledger().blocks())
    if (contains(b.payload)) return true;
  return false;
}

}  // namespace l2ai
