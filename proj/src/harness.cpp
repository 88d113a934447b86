#include "l2ai/harness.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "l2ai/cipher.hpp"
#include "l2ai/hash.hpp"

namespace l2ai {
namespace {

constexpr std::size_t kHonestSeeds = 20;
constexpr std::size_t kFuzzSessions = 1000;

SimConfig make_config(std::uint64_t seed, Timestamp base_delay, const RunOptions& opt,
                      std::optional<Timestamp> scenario_delta = std::nullopt) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.base_delay = base_delay;
  if (scenario_delta) cfg.server.delta_t = *scenario_delta;
  if (opt.delta_t) cfg.server.delta_t = *opt.delta_t;
  if (opt.permissions) cfg.server.permissions = *opt.permissions;
  return cfg;
}

Report empty_report(std::string id, const SimConfig& cfg) {
  Report r;
  r.id = std::move(id);
  r.seed = cfg.seed;
  r.delta_t = cfg.server.delta_t;
  r.base_delay = cfg.base_delay;
  return r;
}

bool rejected(const Simulation& sim, const std::string& entity, ErrorCode code) {
  return std::any_of(sim.outcomes().begin(), sim.outcomes().end(), [&](const Outcome& o) {
    return !o.ok && o.entity == entity && o.code == code;
  });
}

std::string hex_or_none(const std::optional<Digest160>& d) { return d ? d->hex() : std::string("none"); }

void execute(const Scenario& sc, Simulation& sim, Report& report) {
  for (const auto& [name, role] : sc.users) sim.add_user(name, role);
  for (const auto& action : sc.actions) sim.channel().add_action(action);

  using K = ScenarioStep::Kind;
  for (const ScenarioStep& s : sc.script) {
    const std::string label = "line " + std::to_string(s.line) + ": " + s.text;
    switch (s.kind) {
      case K::Register: sim.register_user(s.subject); break;
      case K::Login: sim.login(s.subject, s.arg); break;
      case K::UpdateCreds: sim.update_credentials(s.subject); break;
      case K::UpdateAuthz:
        sim.update_authorization(s.subject, s.arg ? std::optional<Role>(parse_role(*s.arg)) : std::nullopt);
        break;
      case K::Advance: sim.advance(s.number); break;
      case K::Noise: sim.set_noise(s.subject, s.number); break;
      case K::ExpectSkAgree: {
        const auto k = sim.last_keys(s.subject);
        report.check(label, k.user && k.server && *k.user == *k.server,
                     "user=" + hex_or_none(k.user) + " server=" + hex_or_none(k.server));
        break;
      }
      case K::ExpectNoSk: {
        const auto k = sim.last_keys(s.subject);
        report.check(label, !k.user, "user=" + hex_or_none(k.user));
        break;
      }
      case K::ExpectReject: report.check(label, rejected(sim, s.subject, s.code)); break;
      case K::ExpectAccepted: {
        const auto n = sim.accepted_authentications();
        report.check(label, n == s.number, "accepted=" + std::to_string(n));
        break;
      }
      case K::ExpectChainValid: report.check(label, sim.server().ledger().verify_chain()); break;
      case K::ExpectNoLeak: report.check(label, !sim.secret_exposed()); break;
    }
  }
  if (sim.channel().pending_replays() != 0)
    throw Error(ErrorCode::UnknownSeq, "replay of a seq that was never eavesdropped");
}

void merge_report(Report& into, const Report& part) {
  for (const auto& a : part.assertions) into.assertions.push_back({part.id + ": " + a.name, a.pass, a.detail});
  for (const auto& m : part.metrics) {
    auto it = std::find_if(into.metrics.begin(), into.metrics.end(),
                           [&](const PhaseMetrics& x) { return x.phase == m.phase && x.side == m.side; });
    if (it == into.metrics.end()) {
      into.metrics.push_back(m);
    } else {
      it->ops += m.ops;
      it->bytes_sent += m.bytes_sent;
    }
  }
  std::sort(into.metrics.begin(), into.metrics.end(), [](const PhaseMetrics& a, const PhaseMetrics& b) {
    return std::pair(a.phase, a.side) < std::pair(b.phase, b.side);
  });
  into.total_ops += part.total_ops;
  into.runs += part.runs;
  into.events.insert(into.events.end(), part.events.begin(), part.events.end());
  into.ledger = part.ledger;
}

Report suite_honest(const RunOptions& opt) {
  const std::uint64_t base = opt.seed.value_or(1);
  Report report = empty_report("suite:honest", make_config(base, ms(50), opt));
  std::size_t agreed = 0, sessions = 0;
  for (std::uint64_t i = 0; i < kHonestSeeds; ++i) {
    Simulation sim(make_config(base + i, ms(50), opt));
    sim.add_user("alice", Role::Doctor);
    sim.add_user("bob", Role::Patient);
    bool ok = true;
    auto session = [&](const std::string& who) {
      sim.login(who);
      const auto k = sim.last_keys(who);
      ++sessions;
      if (k.user && k.server && *k.user == *k.server) {
        ++agreed;
      } else {
        ok = false;
      }
    };
    sim.register_user("alice");
    sim.register_user("bob");
    session("alice");
    session("bob");
    sim.advance(500);
    sim.update_credentials("alice");
    session("alice");
    sim.update_authorization("bob", Role::Nurse);
    session("bob");
    sim.advance(60'000);
    session("alice");
    session("bob");
    report.check("seed " + std::to_string(base + i) + " all phases", ok);
    report.absorb(sim, "seed " + std::to_string(base + i) + " ");
  }
  report.check("sessions with equal SK", agreed == sessions,
               std::to_string(agreed) + "/" + std::to_string(sessions));
  return report;
}

Report suite_attacks(const RunOptions& opt) {
  Report report = empty_report("suite:attacks", make_config(opt.seed.value_or(42), ms(50), opt));
  for (const auto& [name, text] : builtin_scenarios()) {
    if (name == "honest") continue;
    merge_report(report, run_scenario(parse_scenario(text, std::string(name)), opt));
  }
  return report;
}

Report suite_metrics(const RunOptions& opt) {
  const SimConfig cfg = make_config(opt.seed.value_or(42), ms(50), opt);
  Report report = empty_report("suite:metrics", cfg);
  Simulation sim(cfg);
  sim.add_user("alice", Role::Doctor);
  sim.register_user("alice");
  sim.login("alice");
  const auto k = sim.last_keys("alice");
  report.check("session key agreed", k.user && k.server && *k.user == *k.server);
  sim.update_credentials("alice");
  sim.update_authorization("alice");
  report.absorb(sim);

  auto m = [&](Phase p, Side s) { return report.metric(p, s) ? *report.metric(p, s) : PhaseMetrics{p, s, {}, 0}; };
  const auto user_hash = m(Phase::Login, Side::User).ops.hash_count + m(Phase::AuthKeyExchange, Side::User).ops.hash_count;
  const auto server_hash = m(Phase::AuthKeyExchange, Side::Server).ops.hash_count;
  report.check("user login+verify hash_ops = 7", user_hash == 7, "got " + std::to_string(user_hash));
  report.check("server authenticate hash_ops = 10 (h(S_HMS), h(ID_HMS||S_HMS) cached)", server_hash == 10,
               "got " + std::to_string(server_hash));
  report.check("server authenticate hash_ops within 9..12", server_hash >= 9 && server_hash <= 12);
  report.check("Msg1 bytes = 68", m(Phase::Login, Side::User).bytes_sent == Msg1::kWireSize);
  report.check("Msg2 bytes = 48", m(Phase::AuthKeyExchange, Side::Server).bytes_sent == Msg2::kWireSize);
  report.check("RegRequest bytes = 60", m(Phase::Registration, Side::User).bytes_sent == RegRequest::kWireSize);
  report.check("provisional card bytes = 120",
               m(Phase::Registration, Side::Server).bytes_sent == ProvisionalCard::kWireSize);
  return report;
}

Report suite_fuzz(const RunOptions& opt) {
  const SimConfig cfg = make_config(opt.seed.value_or(7), ms(50), opt);
  Report report = empty_report("suite:fuzz", cfg);
  Simulation sim(cfg);
  Rng rng(cfg.seed ^ 0xF0F0F0F0F0F0F0F0ULL);

  std::vector<std::string> names;
  for (std::size_t i = 0; i < 8; ++i) {
    names.push_back("u" + std::to_string(i));
    sim.add_user(names.back(), kAllRoles[i % kAllRoles.size()]);
    sim.register_user(names.back());
  }

  std::size_t honest = 0, honest_ok = 0, tampered = 0, tampered_accepted = 0, mismatched = 0;
  for (std::size_t session = 0; session < kFuzzSessions; ++session) {
    const std::string& who = names[rng.uniform(names.size())];
    const auto maintenance = rng.uniform(100);
    if (maintenance < 4) {
      sim.update_credentials(who);
    } else if (maintenance < 8) {
      sim.update_authorization(who, kAllRoles[rng.uniform(kAllRoles.size())]);
    } else if (maintenance < 14) {
      sim.set_noise(who, rng.uniform(2 * kCodeBlocks + 1));
    }
    sim.advance(rng.uniform(3000));

    const std::size_t accepted_before = sim.accepted_authentications();
    const std::uint64_t msg1_seq = sim.channel().next_seq();
    const auto mode = rng.uniform(100);
    if (mode < 15) {
      sim.channel().add_action({Match{std::nullopt, std::nullopt, msg1_seq},
                                Modify{rng.uniform(Msg1::kWireSize), static_cast<std::uint8_t>(1 + rng.uniform(255))}});
    } else if (mode < 25) {
      sim.channel().add_action({Match{std::nullopt, std::nullopt, msg1_seq + 1},
                                Modify{rng.uniform(Msg2::kWireSize), static_cast<std::uint8_t>(1 + rng.uniform(255))}});
    } else if (mode < 30) {
      sim.channel().add_action({Match{std::nullopt, std::nullopt, msg1_seq}, Drop{}});
    } else if (mode < 35) {
      sim.channel().add_action({Match{std::nullopt, std::nullopt, msg1_seq}, Eavesdrop{}});
      sim.channel().add_action({Match{}, Replay{msg1_seq, cfg.server.delta_t + ms(1 + rng.uniform(500)), true}});
    }
    sim.login(who);
    const auto k = sim.last_keys(who);
    if (k.user && k.server && *k.user != *k.server) ++mismatched;
    if (mode < 25) {
      ++tampered;
      // A modified Msg1 must never be accepted; a modified Msg2 must never yield a user key.
      const bool server_took_it = mode < 15 && sim.accepted_authentications() != accepted_before;
      if (k.user || server_took_it) ++tampered_accepted;
    } else if (mode >= 30) {
      ++honest;
      if (k.user && k.server && *k.user == *k.server) ++honest_ok;
    }
  }
  report.check("honest sessions agree on SK", honest == honest_ok,
               std::to_string(honest_ok) + "/" + std::to_string(honest));
  report.check("tampered sessions accepted", tampered_accepted == 0,
               std::to_string(tampered_accepted) + " of " + std::to_string(tampered));
  report.check("sessions with mismatched SK", mismatched == 0, std::to_string(mismatched));
  report.absorb(sim);
  return report;
}

}  // namespace

std::string_view tool_version() noexcept { return L2AI_VERSION; }

void Report::check(std::string name, bool pass, std::string detail) {
  assertions.push_back({std::move(name), pass, std::move(detail)});
}

bool Report::passed() const { return failures() == 0; }

std::size_t Report::failures() const {
  return static_cast<std::size_t>(
      std::count_if(assertions.begin(), assertions.end(), [](const Assertion& a) { return !a.pass; }));
}

const Assertion* Report::find(std::string_view name) const {
  for (const auto& a : assertions)
    if (a.name == name) return &a;
  return nullptr;
}

const PhaseMetrics* Report::metric(Phase phase, Side side) const {
  for (const auto& m : metrics)
    if (m.phase == phase && m.side == side) return &m;
  return nullptr;
}

void Report::absorb(const Simulation& sim, const std::string& prefix) {
  Report part;
  part.id = id;
  part.metrics = sim.metrics().list();
  part.total_ops = sim.ops_since_start();
  part.runs = 1;
  part.events = sim.channel().log().lines();
  part.ledger = sim.server().ledger().export_lines();
  merge_report(*this, part);
  check(prefix + "chain-valid", sim.server().ledger().verify_chain());
  check(prefix + "secret-confinement", !sim.secret_exposed());
  const bool complete = sim.metrics().total() == sim.ops_since_start();
  check(prefix + "counter-completeness", complete);
}

Digest160 Report::events_digest() const {
  Bytes all;
  for (const auto& line : events) {
    append(all, as_bytes(line));
    all.push_back('\n');
  }
  return detail::sha256_160({ByteView(all)});
}

std::vector<std::string> Report::lines() const {
  std::vector<std::string> out;
  out.push_back("report " + id);
  out.push_back("seed " + std::to_string(seed));
  out.push_back("version tool=" + std::string(tool_version()) + " hash=" + std::string(kHashAlgorithm) +
                " cipher=" + std::string(kCipherAlgorithm) + " delta_t=" + std::to_string(delta_t.millis) +
                " base_delay=" + std::to_string(base_delay.millis));
  for (const auto& a : assertions)
    out.push_back("assert " + std::string(a.pass ? "PASS " : "FAIL ") + a.name + (a.detail.empty() ? "" : " [" + a.detail + "]"));
  for (const auto& m : metrics) out.push_back(m.to_line());
  out.push_back("total hash=" + std::to_string(total_ops.hash_count) + " xor=" + std::to_string(total_ops.xor_count) +
                " enc=" + std::to_string(total_ops.enc_count) + " dec=" + std::to_string(total_ops.dec_count) +
                " fe=" + std::to_string(total_ops.fe_count));
  out.push_back("events count=" + std::to_string(events.size()) + " digest=" + events_digest().hex());
  out.push_back("ledger blocks=" + std::to_string(ledger.size()));
  out.push_back("summary runs=" + std::to_string(runs) + " assertions=" + std::to_string(assertions.size()) +
                " passed=" + std::to_string(assertions.size() - failures()) + " failed=" +
                std::to_string(failures()) + " result=" + (passed() ? "PASS" : "FAIL"));
  return out;
}

std::string Report::render() const {
  std::string out;
  for (const auto& line : lines()) out += line + '\n';
  return out;
}

Report run_scenario(const Scenario& scenario, const RunOptions& options) {
  const SimConfig cfg = make_config(options.seed.value_or(scenario.seed), scenario.base_delay, options, scenario.delta_t);
  Report report = empty_report(scenario.id, cfg);
  Simulation sim(cfg);
  try {
    execute(scenario, sim, report);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownSeq) throw;
    report.check("script", false, e.what());
  }
  report.absorb(sim);
  return report;
}

Report run_scenario(const std::filesystem::path& path, const RunOptions& options) {
  return run_scenario(load_scenario(path), options);
}

const std::vector<std::string_view>& suite_names() {
  static const std::vector<std::string_view> names = {"honest", "attacks", "metrics", "fuzz"};
  return names;
}

Report run_suite(std::string_view name, const RunOptions& options) {
  if (name == "honest") return suite_honest(options);
  if (name == "attacks") return suite_attacks(options);
  if (name == "metrics") return suite_metrics(options);
  if (name == "fuzz") return suite_fuzz(options);
  throw Error(ErrorCode::ConfigError, "unknown suite '" + std::string(name) + "'");
}

std::vector<std::string> trace_lines(const Report& report) {
  std::vector<std::string> out;
  out.push_back("# l2ai trace v1");
  out.push_back("# report " + (report.id.empty() ? std::string("-") : report.id) + " seed " + std::to_string(report.seed));
  for (const auto& e : report.events) out.push_back("event " + e);
  for (const auto& l : report.ledger) out.push_back("ledger " + l);
  return out;
}

void export_trace(const Report& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
  for (const auto& line : trace_lines(report)) out << line << '\n';
  if (!out) throw Error(ErrorCode::IOError, "write failed for " + path.string());
}

}  // namespace l2ai
