#pragma once

#include <string>

#include "filtlab/scenario.hpp"

namespace filtlab {

struct RunOutcome {
  bool all_passed = false;
  Json report;            // full machine-readable report
  std::string summary;    // one line per check plus a verdict footer
  std::string paths_csv;  // sampled path table; empty unless emit_paths > 0
};

// Executes every requested check. Pure computation: no I/O, no clocks, so
// the outcome is byte-identical across runs and thread counts.
RunOutcome run_scenario(const Scenario& sc);

// Writes report.json and summary.txt (and paths.csv when emit_paths > 0)
// into sc.output_dir, creating it if needed.
void write_outputs(const Scenario& sc, const RunOutcome& outcome);

// Sampled per-node path table for plotting; written by write_outputs when
// emit_paths > 0 and by the emit-plot-data CLI command.
std::string render_paths_csv(const Scenario& sc, std::size_t max_paths);

// parse + validate + run + write. Returns the process exit code:
// 0 all checks passed, 1 at least one check failed, 2 configuration error.
int run_scenario_file(const std::string& config_path);

int emit_plot_data_file(const std::string& config_path);

std::string list_checks_text();

}  // namespace filtlab
