#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "l2ai/scenario.hpp"
#include "l2ai/simulation.hpp"

namespace l2ai {

std::string_view tool_version() noexcept;

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<Timestamp> delta_t;
  std::optional<PermissionTable> permissions;
};

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string id;
  std::uint64_t seed = 0;
  Timestamp delta_t = kDefaultFreshnessWindow;
  Timestamp base_delay = ms(50);
  std::vector<Assertion> assertions;
  std::vector<PhaseMetrics> metrics;
  OpCounters total_ops;
  std::size_t runs = 0;
  std::vector<std::string> events;  // event log lines, every run in order
  std::vector<std::string> ledger;  // ledger dump of the last run

  void check(std::string name, bool pass, std::string detail = {});
  bool passed() const;
  std::size_t failures() const;
  const Assertion* find(std::string_view name) const;
  const PhaseMetrics* metric(Phase phase, Side side) const;

  // Folds in one finished simulation: metrics are summed per (phase, side),
  // events appended, ledger replaced. Also checks the run-level invariants
  // (chain valid, S_HMS confined, counters complete).
  void absorb(const Simulation& sim, const std::string& prefix = {});

  Digest160 events_digest() const;
  // Line-delimited key-value records ending in a summary block.
  std::vector<std::string> lines() const;
  std::string render() const;
};

// Throws Error(UnknownSeq) if a replay never found its envelope; script
// problems surface as failed assertions.
Report run_scenario(const Scenario& scenario, const RunOptions& options = {});
Report run_scenario(const std::filesystem::path& path, const RunOptions& options = {});

// honest | attacks | metrics | fuzz. Throws Error(ConfigError) for other names.
Report run_suite(std::string_view name, const RunOptions& options = {});
const std::vector<std::string_view>& suite_names();

// Scenario files compiled into the library: (name, text).
const std::vector<std::pair<std::string_view, std::string_view>>& builtin_scenarios();

// Header lines, then "event ..." and "ledger ..." lines. Throws Error(IOError).
void export_trace(const Report& report, const std::filesystem::path& path);
std::vector<std::string> trace_lines(const Report& report);

}  // namespace l2ai
