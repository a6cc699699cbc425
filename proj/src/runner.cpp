#include "filtlab/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "filtlab/checks.hpp"

namespace filtlab {

namespace {

// Shortest round-trip formatting; stable across runs and thread counts.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_csv(CheckContext& ctx, std::size_t max_paths) {
  const TimeGrid& grid = ctx.grid();
  const PathEnsemble& driver = ctx.driver();
  const Decomposition& d = ctx.decomposition();
  std::size_t n = ctx.times_per_path();
  std::size_t paths = std::min(max_paths, driver.n_paths());

  std::ostringstream out;
  out << "path,node,time,original,martingale_part,drift_before,drift_after";
  for (std::size_t c = 0; c < driver.dim(); ++c) out << ",w" << c;
  for (std::size_t i = 0; i < n; ++i) out << ",tau" << i;
  if (ctx.family() ? ctx.family()->has_mark() : (ctx.model() && ctx.model()->has_mark()))
    for (std::size_t i = 0; i < n; ++i) out << ",mark" << i;
  out << "\n";

  bool marks = ctx.family() ? ctx.family()->has_mark() : (ctx.model() && ctx.model()->has_mark());
  for (std::size_t p = 0; p < paths; ++p) {
    auto samples = ctx.samples().subspan(p * n, n);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
      out << p << ',' << i << ',' << fmt(grid.node(i)) << ','
          << fmt(d.original.at(p, i)) << ',' << fmt(d.martingale_part.at(p, i)) << ','
          << fmt(d.drift_before.at(p, i)) << ',' << fmt(d.drift_after.at(p, i));
      for (std::size_t c = 0; c < driver.dim(); ++c) out << ',' << fmt(driver.value(p, i, c));
      for (std::size_t k = 0; k < n; ++k) out << ',' << fmt(samples[k].tau);
      if (marks)
        for (std::size_t k = 0; k < n; ++k) out << ',' << fmt(samples[k].mark);
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace

RunOutcome run_scenario(const Scenario& sc) {
  CheckContext ctx(sc);
  const auto& registry = check_registry();

  RunOutcome outcome;
  Json checks = Json::array();
  std::size_t passed = 0;
  std::ostringstream summary;
  for (const std::string& name : sc.checks) {
    CheckResult result = registry.at(name).run(ctx);
    if (result.pass) ++passed;
    summary << (result.pass ? "[PASS] " : "[FAIL] ") << result.name << "\n";
    Json entry;
    entry["name"] = result.name;
    entry["pass"] = result.pass;
    entry["details"] = std::move(result.details);
    checks.push_back(std::move(entry));
  }
  outcome.all_passed = passed == sc.checks.size();
  summary << passed << "/" << sc.checks.size() << " checks passed\n";
  outcome.summary = summary.str();

  outcome.report["id"] = sc.id;
  outcome.report["scenario"] = scenario_to_json(sc);
  outcome.report["checks"] = std::move(checks);
  outcome.report["overall_pass"] = outcome.all_passed;

  if (sc.emit_paths > 0) outcome.paths_csv = render_csv(ctx, sc.emit_paths);
  return outcome;
}

void write_outputs(const Scenario& sc, const RunOutcome& outcome) {
  namespace fs = std::filesystem;
  fs::create_directories(sc.output_dir);
  {
    std::ofstream f(fs::path(sc.output_dir) / "report.json", std::ios::binary);
    f << outcome.report.dump(2) << "\n";
  }
  {
    std::ofstream f(fs::path(sc.output_dir) / "summary.txt", std::ios::binary);
    f << outcome.summary;
  }
  if (!outcome.paths_csv.empty()) {
    std::ofstream f(fs::path(sc.output_dir) / "paths.csv", std::ios::binary);
    f << outcome.paths_csv;
  }
}

std::string render_paths_csv(const Scenario& sc, std::size_t max_paths) {
  CheckContext ctx(sc);
  return render_csv(ctx, max_paths);
}

int run_scenario_file(const std::string& config_path) {
  Scenario sc;
  try {
    sc = load_scenario_file(config_path);
    validate_scenario(sc);
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  RunOutcome outcome;
  try {
    outcome = run_scenario(sc);
    write_outputs(sc, outcome);
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  std::cout << outcome.summary;
  return outcome.all_passed ? 0 : 1;
}

int emit_plot_data_file(const std::string& config_path) {
  Scenario sc;
  try {
    sc = load_scenario_file(config_path);
    validate_scenario(sc);
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  try {
    std::size_t paths = sc.emit_paths > 0 ? sc.emit_paths : 10;
    std::string csv = render_paths_csv(sc, paths);
    std::filesystem::create_directories(sc.output_dir);
    auto out_path = std::filesystem::path(sc.output_dir) / "paths.csv";
    std::ofstream f(out_path, std::ios::binary);
    f << csv;
    std::cout << "wrote " << out_path.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

std::string list_checks_text() {
  std::ostringstream out;
  for (const auto& [name, entry] : check_registry()) {
    out << name << "\n    " << entry.description << "\n    applies to: " << entry.requires_text
        << "\n";
  }
  return out.str();
}

}  // namespace filtlab
