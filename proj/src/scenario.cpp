#include "l2ai/scenario.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace l2ai {
namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::uint64_t number(const std::string& s, std::size_t line, const char* what) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) parse_error(line, std::string("bad ") + what + " '" + s + "'");
  return v;
}

std::optional<std::string> wildcard(const std::string& s) {
  if (s == "*") return std::nullopt;
  return s;
}

class LineParser {
 public:
  LineParser(Scenario& sc, std::size_t line, std::vector<std::string> words, std::string text)
      : sc_(sc), line_(line), w_(std::move(words)), text_(std::move(text)) {}

  void parse() {
    const std::string& op = w_[0];
    if (op == "seed") {
      arity(2);
      sc_.seed = num(1, "seed");
    } else if (op == "delay") {
      arity(2);
      sc_.base_delay = ms(num(1, "delay"));
    } else if (op == "delta-t") {
      arity(2);
      sc_.delta_t = ms(num(1, "delta-t"));
    } else if (op == "user") {
      arity(3);
      for (const auto& [name, role] : sc_.users)
        if (name == w_[1]) parse_error(line_, "duplicate user '" + w_[1] + "'");
      Role role{};
      try {
        role = parse_role(w_[2]);
      } catch (const Error&) {
        parse_error(line_, "unknown role '" + w_[2] + "'");
      }
      sc_.users.emplace_back(w_[1], role);
    } else if (op == "eavesdrop" || op == "drop") {
      arity(4);
      Match m{wildcard(w_[1]), wildcard(w_[2]), std::nullopt};
      if (w_[3] != "*") m.seq = num(3, "seq");
      sc_.actions.push_back({m, op == "drop" ? ActionKind{Drop{}} : ActionKind{Eavesdrop{}}});
    } else if (op == "hold") {
      arity(3);
      sc_.actions.push_back({seq_match(1), Delay{num(2, "delay")}});
    } else if (op == "modify") {
      arity(4);
      Bytes mask;
      try {
        mask = from_hex(w_[3]);
      } catch (const Error&) {
        parse_error(line_, "bad mask '" + w_[3] + "'");
      }
      if (mask.size() != 1) parse_error(line_, "mask must be one byte");
      sc_.actions.push_back({seq_match(1), Modify{static_cast<std::size_t>(num(2, "offset")), mask[0]}});
    } else if (op == "replay") {
      arity(3);
      Replay r;
      r.of_seq = num(1, "seq");
      std::string at = w_[2];
      if (!at.empty() && at[0] == '+') {
        r.relative = true;
        at.erase(0, 1);
      }
      r.at = ms(number(at, line_, "time"));
      sc_.actions.push_back({seq_match(1), r});
    } else if (op == "honest") {
      honest();
    } else if (op == "advance") {
      arity(2);
      step(ScenarioStep::Kind::Advance).number = num(1, "duration");
    } else if (op == "noise") {
      arity(3);
      auto& s = step(ScenarioStep::Kind::Noise);
      s.subject = known_user(1);
      s.number = num(2, "flip count");
    } else if (op == "expect") {
      expect();
    } else {
      parse_error(line_, "unknown directive '" + op + "'");
    }
  }

 private:
  void arity(std::size_t n) {
    if (w_.size() != n) parse_error(line_, "'" + w_[0] + "' takes " + std::to_string(n - 1) + " argument(s)");
  }
  void arity(std::size_t lo, std::size_t hi) {
    if (w_.size() < lo || w_.size() > hi) parse_error(line_, "wrong number of arguments to '" + w_[0] + "'");
  }
  std::uint64_t num(std::size_t i, const char* what) { return number(w_[i], line_, what); }
  Match seq_match(std::size_t i) { return Match{std::nullopt, std::nullopt, num(i, "seq")}; }

  const std::string& known_user(std::size_t i) {
    for (const auto& [name, role] : sc_.users)
      if (name == w_[i]) return w_[i];
    parse_error(line_, "undeclared user '" + w_[i] + "'");
  }

  ScenarioStep& step(ScenarioStep::Kind kind) {
    ScenarioStep s;
    s.kind = kind;
    s.line = line_;
    s.text = text_;
    sc_.script.push_back(std::move(s));
    return sc_.script.back();
  }

  void honest() {
    if (w_.size() < 3) parse_error(line_, "honest needs a phase and a user");
    const std::string& phase = w_[1];
    using K = ScenarioStep::Kind;
    K kind{};
    if (phase == "register") {
      arity(3);
      kind = K::Register;
    } else if (phase == "login") {
      arity(3, 4);
      kind = K::Login;
      if (w_.size() == 4 && !is_known_scope(w_[3])) parse_error(line_, "unknown scope '" + w_[3] + "'");
    } else if (phase == "update-creds") {
      arity(3);
      kind = K::UpdateCreds;
    } else if (phase == "update-authz") {
      arity(3, 4);
      kind = K::UpdateAuthz;
      if (w_.size() == 4) {
        try {
          parse_role(w_[3]);
        } catch (const Error&) {
          parse_error(line_, "unknown role '" + w_[3] + "'");
        }
      }
    } else {
      parse_error(line_, "unknown phase '" + phase + "'");
    }
    auto& s = step(kind);
    s.subject = known_user(2);
    if (w_.size() == 4) s.arg = w_[3];
  }

  void expect() {
    if (w_.size() < 2) parse_error(line_, "expect needs a condition");
    const std::string& what = w_[1];
    using K = ScenarioStep::Kind;
    if (what == "sk-agree" || what == "no-sk") {
      arity(3);
      step(what == "sk-agree" ? K::ExpectSkAgree : K::ExpectNoSk).subject = known_user(2);
    } else if (what == "reject") {
      arity(4);
      const auto code = parse_error_code(w_[3]);
      if (!code) parse_error(line_, "unknown error '" + w_[3] + "'");
      auto& s = step(K::ExpectReject);
      s.subject = w_[2];
      s.code = *code;
    } else if (what == "accepted") {
      arity(3);
      const auto n = num(2, "count");
      step(K::ExpectAccepted).number = n;
    } else if (what == "chain-valid") {
      arity(2);
      step(K::ExpectChainValid);
    } else if (what == "no-leak") {
      arity(2);
      step(K::ExpectNoLeak);
    } else {
      parse_error(line_, "unknown expectation '" + what + "'");
    }
  }

  Scenario& sc_;
  std::size_t line_;
  std::vector<std::string> w_;
  std::string text_;
};

}  // namespace

Scenario parse_scenario(std::string_view text, std::string id) {
  Scenario sc;
  sc.id = std::move(id);
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream fields(raw);
    std::vector<std::string> words;
    for (std::string w; fields >> w;) words.push_back(w);
    if (words.empty()) continue;
    std::string trimmed;
    for (const auto& w : words) trimmed += (trimmed.empty() ? "" : " ") + w;
    LineParser(sc, line_no, std::move(words), std::move(trimmed)).parse();
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOError, "cannot open scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.stem().string());
}

}  // namespace l2ai
