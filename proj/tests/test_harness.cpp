#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "l2ai/harness.hpp"
#include "l2ai/hash.hpp"

namespace l2ai {
namespace {

const std::filesystem::path kSource = L2AI_SOURCE_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

Scenario builtin(std::string_view name) {
  for (const auto& [n, text] : builtin_scenarios())
    if (n == name) return parse_scenario(text, std::string(n));
  throw std::runtime_error("no builtin " + std::string(name));
}

TEST(ScenarioParse, ReadsEveryDirective) {
  const auto sc = parse_scenario(R"(
    seed 9        # comment
    delay 20
    delta-t 1500
    user alice D
    user bob USER_Patient
    eavesdrop * hms *
    drop alice * 3
    hold 4 100
    modify 3 8 0f
    replay 3 +60
    replay 5 4000
    honest register alice
    honest login alice read-patient-record
    honest update-creds alice
    honest update-authz bob N
    advance 10
    noise alice 4
    expect sk-agree alice
    expect no-sk bob
    expect reject hms BadMac
    expect accepted 2
    expect chain-valid
    expect no-leak
  )");
  EXPECT_EQ(sc.seed, 9u);
  EXPECT_EQ(sc.base_delay, ms(20));
  EXPECT_EQ(sc.delta_t, ms(1500));
  ASSERT_EQ(sc.users.size(), 2u);
  EXPECT_EQ(sc.users[1].second, Role::Patient);
  EXPECT_EQ(sc.actions.size(), 6u);
  EXPECT_FALSE(sc.actions[0].match.from);
  EXPECT_EQ(sc.actions[0].match.to, "hms");
  const auto& mod = std::get<Modify>(sc.actions[3].kind);
  EXPECT_EQ(mod.offset, 8u);
  EXPECT_EQ(mod.mask, 0x0F);
  EXPECT_TRUE(std::get<Replay>(sc.actions[4].kind).relative);
  EXPECT_FALSE(std::get<Replay>(sc.actions[5].kind).relative);
  ASSERT_EQ(sc.script.size(), 12u);
  EXPECT_EQ(sc.script[1].arg, "read-patient-record");
  EXPECT_EQ(sc.script[8].code, ErrorCode::BadMac);
  EXPECT_EQ(sc.script[0].line, 13u);
}

TEST(ScenarioParse, MalformedLinesNameTheLine) {
  const std::pair<const char*, const char*> cases[] = {
      {"user alice D\nfrobnicate\n", "line 2"},
      {"seed x\n", "line 1"},
      {"user alice Q\n", "line 1"},
      {"user alice D\nuser alice N\n", "line 2"},
      {"honest login alice\n", "line 1"},
      {"user alice D\nhonest dance alice\n", "line 2"},
      {"user alice D\nhonest login alice no-such-scope\n", "line 2"},
      {"modify 3 8 zz\n", "line 1"},
      {"modify 3 8 0102\n", "line 1"},
      {"replay 3\n", "line 1"},
      {"\n\nexpect reject hms Nope\n", "line 3"},
      {"expect maybe\n", "line 1"},
      {"drop a b\n", "line 1"},
  };
  for (const auto& [text, where] : cases) {
    try {
      parse_scenario(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << text;
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  }
}

TEST(ScenarioParse, MissingFileIsIOError) {
  try {
    load_scenario("/nonexistent/x.scn");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IOError);
  }
}

TEST(Builtins, MatchScenarioFilesOnDisk) {
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kSource / "scenarios")) {
    if (entry.path().extension() != ".scn") continue;
    ++files;
    const auto stem = entry.path().stem().string();
    bool found = false;
    for (const auto& [name, text] : builtin_scenarios())
      if (name == stem) {
        found = true;
        EXPECT_EQ(text, slurp(entry.path())) << stem;
      }
    EXPECT_TRUE(found) << stem;
  }
  EXPECT_EQ(files, builtin_scenarios().size());
}

TEST(Scenarios, EveryShippedScenarioPasses) {
  for (const auto& [name, text] : builtin_scenarios()) {
    const Report r = run_scenario(parse_scenario(text, std::string(name)));
    EXPECT_TRUE(r.passed()) << r.render();
    EXPECT_GE(r.assertions.size(), 4u);
  }
}

TEST(Scenarios, FailingExpectationFailsTheReport) {
  const Report r = run_scenario(parse_scenario("user a D\nhonest register a\nhonest login a\nexpect no-sk a\n"));
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.failures(), 1u);
  EXPECT_NE(r.render().find("result=FAIL"), std::string::npos);
}

TEST(Scenarios, ReplayWithoutEavesdropIsUnknownSeq) {
  const auto sc = parse_scenario("user a D\nreplay 3 +10\nhonest register a\nhonest login a\n");
  try {
    run_scenario(sc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSeq);
  }
}

TEST(Scenarios, ReplayStaleAndFastOutcomes) {
  const Report stale = run_scenario(builtin("replay_stale"));
  const Report fast = run_scenario(builtin("replay_fast"));
  EXPECT_TRUE(stale.passed());
  EXPECT_TRUE(fast.passed());
  auto has = [](const Report& r, const std::string& needle) {
    for (const auto& e : r.events)
      if (e.find(needle) != std::string::npos) return true;
    return false;
  };
  EXPECT_TRUE(has(stale, "reject 3 hms authenticate Stale"));
  EXPECT_TRUE(has(fast, "reject 3 hms authenticate UnknownPrincipal"));
}

TEST(Scenarios, SeedAndDeltaOverrides) {
  RunOptions opt;
  opt.seed = 1234;
  const Report a = run_scenario(builtin("honest"), opt);
  const Report b = run_scenario(builtin("honest"));
  EXPECT_EQ(a.seed, 1234u);
  EXPECT_TRUE(a.passed());
  EXPECT_NE(a.events_digest(), b.events_digest());

  // A wider window lets the stale replay through the freshness check; the
  // retired pseudonym still stops it.
  RunOptions wide;
  wide.delta_t = ms(5000);
  const Report w = run_scenario(builtin("replay_stale"), wide);
  EXPECT_FALSE(w.passed());
  EXPECT_EQ(w.delta_t, ms(5000));
}

TEST(Reports, DeterministicAcrossRuns) {
  for (std::string_view suite : suite_names()) {
    const Report a = run_suite(suite);
    const Report b = run_suite(suite);
    EXPECT_EQ(a.render(), b.render()) << suite;
    EXPECT_EQ(trace_lines(a), trace_lines(b)) << suite;
  }
}

TEST(Reports, SuitesPass) {
  for (std::string_view suite : suite_names()) {
    const Report r = run_suite(suite);
    EXPECT_TRUE(r.passed()) << r.render();
  }
  EXPECT_THROW(run_suite("nope"), Error);
}

TEST(Reports, CounterCompletenessInEverySuite) {
  for (std::string_view suite : suite_names()) {
    const Report r = run_suite(suite);
    OpCounters sum;
    for (const auto& m : r.metrics) sum += m.ops;
    EXPECT_EQ(sum, r.total_ops) << suite;
  }
}

TEST(Golden, HonestTraceSeed42) {
  const Report r = run_scenario(builtin("honest"));
  EXPECT_EQ(trace_lines(r), split_lines(slurp(kSource / "tests/golden/honest_seed42.trace")));
}

TEST(Golden, MetricsReportSeed42) {
  const Report r = run_suite("metrics");
  EXPECT_EQ(r.lines(), split_lines(slurp(kSource / "tests/golden/metrics_seed42.txt")));
}

TEST(Export, RoundTripIsByteIdentical) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto p1 = dir / "l2ai_trace_a.txt";
  const auto p2 = dir / "l2ai_trace_b.txt";
  export_trace(run_scenario(builtin("tamper_m2")), p1);
  export_trace(run_scenario(builtin("tamper_m2")), p2);
  EXPECT_EQ(slurp(p1), slurp(p2));
  EXPECT_FALSE(slurp(p1).empty());
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST(Export, EmptyReportIsHeaderOnly) {
  const auto p = std::filesystem::temp_directory_path() / "l2ai_trace_empty.txt";
  export_trace(Report{}, p);
  const auto lines = split_lines(slurp(p));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "# l2ai trace v1");
  std::filesystem::remove(p);
}

TEST(Export, UnwritablePathIsIOError) {
  try {
    export_trace(Report{}, "/nonexistent-dir/trace.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IOError);
  }
}

TEST(Reports, CarryVersions) {
  const auto lines = run_suite("metrics").lines();
  ASSERT_GE(lines.size(), 3u);
  EXPECT_EQ(lines[2].rfind("version tool=" + std::string(tool_version()), 0), 0u);
  EXPECT_NE(lines[2].find(std::string(kHashAlgorithm)), std::string::npos);
  EXPECT_EQ(lines.back().rfind("summary ", 0), 0u);
}

}  // namespace
}  // namespace l2ai
