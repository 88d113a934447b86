#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "l2ai/channel.hpp"
#include "l2ai/counters.hpp"
#include "l2ai/error.hpp"
#include "l2ai/protocol.hpp"

namespace l2ai {

enum class Phase { Setup, Registration, Login, AuthKeyExchange, CredUpdate, AuthzUpdate };
enum class Side { User, Server };

std::string_view phase_name(Phase p) noexcept;
std::string_view side_name(Side s) noexcept;

struct PhaseMetrics {
  Phase phase = Phase::Setup;
  Side side = Side::User;
  OpCounters ops;
  std::uint64_t bytes_sent = 0;

  // "metric <phase> <side> hash=.. xor=.. enc=.. dec=.. fe=.. bytes=.."
  std::string to_line() const;
};

// Per (phase, side) counter deltas. Every counted primitive call made by the
// simulation happens inside exactly one Scope.
class MetricsBook {
 public:
  class Scope {
   public:
    Scope(MetricsBook& book, Phase phase, Side side);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    MetricsBook& book_;
    PhaseMetrics& slot_;
    OpCounters start_;
  };

  Scope scope(Phase phase, Side side) { return Scope(*this, phase, side); }
  void add_bytes(Phase phase, Side side, std::uint64_t n) { slot(phase, side).bytes_sent += n; }

  std::vector<PhaseMetrics> list() const;  // phase order, then User before Server
  const PhaseMetrics* find(Phase phase, Side side) const;
  OpCounters total() const;

 private:
  PhaseMetrics& slot(Phase phase, Side side);
  std::map<std::pair<Phase, Side>, PhaseMetrics> slots_;
};

struct SimConfig {
  std::uint64_t seed = 42;
  Timestamp base_delay = ms(50);
  ServerConfig server;
};

struct Outcome {
  Timestamp at;
  EntityId entity;
  std::string op;  // "register", "login", "authenticate", "verify", ...
  bool ok = false;
  std::optional<ErrorCode> code;
  std::uint64_t seq = 0;
  bool replayed = false;
};

inline constexpr std::string_view kServerEntity = "hms";

// Server plus named users wired onto one channel. Honest steps start a flow
// and run the channel until quiescent.
class Simulation {
 public:
  explicit Simulation(SimConfig config);

  void add_user(const std::string& name, Role role);  // throws Error(ConfigError) on duplicates
  bool has_user(const std::string& name) const { return users_.count(name) != 0; }

  void register_user(const std::string& name);
  // Default scope is the first catalog scope the user's role may use.
  void login(const std::string& name, std::optional<std::string> scope = std::nullopt);
  void update_credentials(const std::string& name);
  void update_authorization(const std::string& name, std::optional<Role> role = std::nullopt);
  void advance(std::uint64_t millis);
  // Bit flips applied to every later biometric reading of this user.
  void set_noise(const std::string& name, std::size_t flips);

  struct SessionKeys {
    std::optional<Digest160> user;
    std::optional<Digest160> server;
  };
  // Keys from the user's most recent login attempt.
  SessionKeys last_keys(const std::string& name) const;

  Channel& channel() noexcept { return channel_; }
  const Channel& channel() const noexcept { return channel_; }
  Server& server() noexcept { return server_; }
  const Server& server() const noexcept { return server_; }
  const ClockHandle& clock() const noexcept { return clock_; }
  const MetricsBook& metrics() const noexcept { return metrics_; }
  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  std::size_t accepted_authentications() const;

  // Counted operations since construction, for the completeness check.
  OpCounters ops_since_start() const { return op_counters() - baseline_; }

  // True iff S_HMS occurs as a contiguous substring of any wire payload or
  // ledger block payload.
  bool secret_exposed() const;

 private:
  struct User {
    std::string name;
    Role role = Role::Patient;
    Credentials creds;
    std::unique_ptr<UserDevice> device;
    std::optional<Token> token;
    std::optional<UserScratch> scratch;
    std::optional<UserSession> session;
    SessionKeys keys;
    std::size_t noise = 0;
  };

  User& user(const std::string& name);
  Credentials noisy(const User& u) const;
  void outcome(const EntityId& entity, std::string op, const Envelope* env, std::optional<ErrorCode> err);
  void on_server(const Envelope& env);
  void on_user(User& u, const Envelope& env);

  SimConfig config_;
  ClockHandle clock_;
  OpCounters baseline_;
  MetricsBook metrics_;
  Rng rng_;
  Server server_;
  Channel channel_;
  std::map<std::string, User> users_;
  std::vector<Outcome> outcomes_;
};

}  // namespace l2ai
