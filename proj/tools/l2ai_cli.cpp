#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "l2ai/harness.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

int emit(const l2ai::Report& report, const std::string& out_path, const std::string& trace_path) {
  if (out_path.empty()) {
    std::cout << report.render();
  } else {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw l2ai::Error(l2ai::ErrorCode::IOError, "cannot write " + out_path);
    out << report.render();
  }
  if (!trace_path.empty()) l2ai::export_trace(report, trace_path);
  return report.passed() ? kExitPass : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"L2AI protocol simulator and test harness"};
  app.set_version_flag("--version", std::string(l2ai::tool_version()));
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> delta_t;
  std::string perm_table;
  app.add_option("--seed", seed, "override the scenario or suite seed");
  app.add_option("--delta-t", delta_t, "freshness window in simulated ms");
  app.add_option("--perm-table", perm_table, "permission table file")->check(CLI::ExistingFile);

  std::string scenario_path, suite_name, trace_path, out_path;

  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--trace", trace_path, "also export the event trace");
  run->add_option("--out", out_path, "write the report here instead of stdout");

  auto* suite = app.add_subcommand("suite", "run a built-in suite");
  suite->add_option("name", suite_name, "honest | attacks | metrics | fuzz")
      ->required()
      ->check(CLI::IsMember({"honest", "attacks", "metrics", "fuzz"}));
  suite->add_option("--trace", trace_path, "also export the event trace");
  suite->add_option("--out", out_path, "write the report here instead of stdout");

  auto* exp = app.add_subcommand("export", "export the event and ledger trace of a scenario");
  exp->add_option("--trace", trace_path, "trace file")->required();
  exp->add_option("scenario", scenario_path, "scenario file (default: built-in honest scenario)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    l2ai::RunOptions opt;
    opt.seed = seed;
    if (delta_t) opt.delta_t = l2ai::ms(*delta_t);
    if (!perm_table.empty()) opt.permissions = l2ai::PermissionTable::load(perm_table);

    if (*run) return emit(l2ai::run_scenario(std::filesystem::path(scenario_path), opt), out_path, trace_path);
    if (*suite) return emit(l2ai::run_suite(suite_name, opt), out_path, trace_path);

    l2ai::Scenario sc;
    if (scenario_path.empty()) {
      for (const auto& [name, text] : l2ai::builtin_scenarios())
        if (name == "honest") sc = l2ai::parse_scenario(text, "honest");
    } else {
      sc = l2ai::load_scenario(scenario_path);
    }
    const l2ai::Report report = l2ai::run_scenario(sc, opt);
    l2ai::export_trace(report, trace_path);
    std::cout << "wrote " << trace_path << " (" << report.events.size() << " events, " << report.ledger.size()
              << " ledger blocks)\n";
    return report.passed() ? kExitPass : kExitAssertion;
  } catch (const l2ai::Error& e) {
    std::cerr << "l2ai: " << e.what() << '\n';
    return e.code() == l2ai::ErrorCode::AssertionFailure ? kExitAssertion : kExitUsage;
  }
}
