#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "filtlab/martingale_lab.hpp"
#include "filtlab/multi_expansion.hpp"
#include "filtlab/scenario.hpp"

namespace filtlab {

// Everything a check may need, built once per scenario run. The decomposition
// is materialized lazily because lattice-only checks never touch it.
class CheckContext {
 public:
  explicit CheckContext(const Scenario& sc);

  const Scenario& scenario() const { return scenario_; }
  const TimeGrid& grid() const { return grid_; }
  const PathEnsemble& driver() const { return driver_; }
  const RandomTimeModel* model() const { return model_.get(); }  // null for families
  const BridgeFamily* family() const { return family_.get(); }   // null otherwise
  std::span<const TimeSample> samples() const { return samples_; }
  std::size_t times_per_path() const { return times_per_path_; }
  const GridProcess& original() const { return original_; }
  const Decomposition& decomposition();     // built on first use
  const GridProcess& corrected();           // original - drift_before - drift_after

  // Feature menu for the filtration under test (driver features plus the
  // revealed-time features; marks included when present).
  std::vector<NamedFeature> expanded_features() const;
  // Driver-only menu (constant, driver value, survival when a model exists).
  std::vector<NamedFeature> coarse_features() const;

 private:
  const Scenario& scenario_;
  TimeGrid grid_;
  std::unique_ptr<RandomTimeModel> model_;
  std::unique_ptr<BridgeFamily> family_;
  PathEnsemble driver_;
  std::vector<TimeSample> samples_;
  std::size_t times_per_path_ = 1;
  GridProcess original_;
  std::optional<Decomposition> decomposition_;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  Json details;  // numbers backing the verdict, embedded test reports
};

struct CheckEntry {
  std::string description;
  // Human-readable statement of which scenarios the check applies to.
  std::string requires_text;
  std::function<bool(const Scenario&)> applicable;
  std::function<CheckResult(CheckContext&)> run;
};

// Name -> check, ordered by name. Stable: the CLI's list-checks output and
// report ordering both come from this map.
const std::map<std::string, CheckEntry>& check_registry();

}  // namespace filtlab
