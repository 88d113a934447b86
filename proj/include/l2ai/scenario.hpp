#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "l2ai/authorization.hpp"
#include "l2ai/channel.hpp"
#include "l2ai/error.hpp"

namespace l2ai {

// One script line. Expectations are checkpoints evaluated where they appear.
struct ScenarioStep {
  enum class Kind {
    Register,
    Login,
    UpdateCreds,
    UpdateAuthz,
    Advance,
    Noise,
    ExpectSkAgree,
    ExpectNoSk,
    ExpectReject,
    ExpectAccepted,
    ExpectChainValid,
    ExpectNoLeak,
  };

  Kind kind = Kind::Advance;
  std::string subject;             // user or entity name
  std::optional<std::string> arg;  // scope for login, role for update-authz
  std::uint64_t number = 0;        // advance ms, noise flips, accepted count
  ErrorCode code = ErrorCode::AssertionFailure;
  std::size_t line = 0;
  std::string text;  // source line, trimmed
};

// Line format (one directive per line, '#' comments):
//   seed <n> | delay <ms> | delta-t <ms> | user <name> <role>
//   eavesdrop|drop <from|*> <to|*> <seq|*>
//   hold <seq> <extra-ms> | modify <seq> <offset> <mask-hex> | replay <seq> <at-ms|+ms>
//   honest register|login|update-creds|update-authz <user> [scope|role]
//   advance <ms> | noise <user> <flips>
//   expect sk-agree|no-sk <user> | expect reject <entity> <Error>
//   expect accepted <n> | expect chain-valid | expect no-leak
// Adversary actions apply for the whole run regardless of their position.
struct Scenario {
  std::string id;
  std::uint64_t seed = 42;
  Timestamp base_delay = ms(50);
  std::optional<Timestamp> delta_t;
  std::vector<std::pair<std::string, Role>> users;
  std::vector<AdversaryAction> actions;
  std::vector<ScenarioStep> script;
};

// Throws Error(ParseError) naming the line.
Scenario parse_scenario(std::string_view text, std::string id = "inline");
Scenario load_scenario(const std::filesystem::path& path);  // id = file stem

}  // namespace l2ai
