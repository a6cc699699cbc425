#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "filtlab/calculus.hpp"
#include "filtlab/single_expansion.hpp"
#include "filtlab/time_models.hpp"

namespace filtlab {

using Json = nlohmann::ordered_json;

// Raised for malformed or inconsistent configuration; the CLI maps it to
// exit code 2. Messages carry a /path/to/key location.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridConfig {
  double horizon = 1.0;
  std::size_t steps = 200;
};

struct EnsembleConfig {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
};

struct ModelConfig {
  std::string kind;  // independent_exp | cox_deterministic | bridge_lognormal |
                     // marked_bridge | bridge_family
  double rate = 1.0;     // independent_exp, cox_deterministic
  double anchor = 2.0;   // bridge kinds
  std::size_t n = 1;     // bridge_family size
  MarkLaw mark = MarkLaw::None;
};

struct MartingaleConfig {
  DriverIntegrand integrand;  // dM = (m0 + m1 s) dW_comp
  std::size_t component = 0;
  DecomposeMode mode = DecomposeMode::Plain;
};

struct Scenario {
  std::string id;
  GridConfig grid;
  EnsembleConfig ensemble;
  ModelConfig model;
  MartingaleConfig martingale;
  std::vector<std::string> checks;
  std::string output_dir = "out";
  std::size_t emit_paths = 0;

  bool is_family() const { return model.kind == "bridge_family"; }
  bool is_bridge() const {
    return model.kind == "bridge_lognormal" || model.kind == "marked_bridge" || is_family();
  }
};

// Strict parse: unknown keys anywhere are errors, as are missing required
// keys and values of the wrong type.
Scenario parse_scenario(const Json& j);
Scenario load_scenario_file(const std::string& path);

// Cross-field validation (horizon vs anchor, component vs family size, check
// names and applicability, bounds on sizes). Throws ScenarioError.
void validate_scenario(const Scenario& sc);

// Round-trip of the parsed configuration for the report echo.
Json scenario_to_json(const Scenario& sc);

}  // namespace filtlab
