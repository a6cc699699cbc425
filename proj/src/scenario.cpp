#include "filtlab/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "filtlab/checks.hpp"

namespace filtlab {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ScenarioError("config error at " + path + ": " + what);
}

const Json& expect_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  return j;
}

// Strictness: every key must be known, so typos surface as errors instead of
// silently falling back to defaults.
void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) fail(path + "/" + item.key(), "unknown key");
}

const Json* find(const Json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const Json& require(const Json& j, const char* key, const std::string& path) {
  const Json* v = find(j, key);
  if (!v) fail(path, std::string("missing required key '") + key + "'");
  return *v;
}

double get_number(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::size_t get_count(const Json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected an integer");
  auto raw = v.get<long long>();
  if (raw < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(raw);
}

std::string get_string(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

MarkLaw parse_mark(const std::string& s, const std::string& path) {
  if (s == "rademacher") return MarkLaw::Rademacher;
  if (s == "sign_anchor") return MarkLaw::SignOfAnchor;
  fail(path, "unknown mark law '" + s + "' (expected rademacher | sign_anchor)");
}

std::string mark_name(MarkLaw law) {
  switch (law) {
    case MarkLaw::Rademacher:
      return "rademacher";
    case MarkLaw::SignOfAnchor:
      return "sign_anchor";
    default:
      return "none";
  }
}

std::string mode_name(DecomposeMode mode) {
  switch (mode) {
    case DecomposeMode::Marked:
      return "marked";
    case DecomposeMode::Plugged:
      return "plugged_zero";
    default:
      return "plain";
  }
}

}  // namespace

Scenario parse_scenario(const Json& root) {
  expect_object(root, "/");
  check_keys(root,
             {"id", "grid", "ensemble", "model", "martingale", "checks", "output", "emit_paths"},
             "");

  Scenario sc;
  sc.id = get_string(require(root, "id", "/id"), "/id");
  if (sc.id.empty()) fail("/id", "must not be empty");

  {
    const Json& g = expect_object(require(root, "grid", "/grid"), "/grid");
    check_keys(g, {"horizon", "steps"}, "/grid");
    sc.grid.horizon = get_number(require(g, "horizon", "/grid"), "/grid/horizon");
    sc.grid.steps = get_count(require(g, "steps", "/grid"), "/grid/steps");
  }
  {
    const Json& e = expect_object(require(root, "ensemble", "/ensemble"), "/ensemble");
    check_keys(e, {"paths", "seed"}, "/ensemble");
    sc.ensemble.n_paths = get_count(require(e, "paths", "/ensemble"), "/ensemble/paths");
    const Json& seed = require(e, "seed", "/ensemble");
    if (!seed.is_number_integer() && !seed.is_number_unsigned())
      fail("/ensemble/seed", "expected an integer");
    sc.ensemble.seed = seed.get<std::uint64_t>();
  }
  {
    const Json& m = expect_object(require(root, "model", "/model"), "/model");
    check_keys(m, {"kind", "rate", "anchor", "n", "mark"}, "/model");
    sc.model.kind = get_string(require(m, "kind", "/model"), "/model/kind");
    if (const Json* v = find(m, "rate")) sc.model.rate = get_number(*v, "/model/rate");
    if (const Json* v = find(m, "anchor")) sc.model.anchor = get_number(*v, "/model/anchor");
    if (const Json* v = find(m, "n")) sc.model.n = get_count(*v, "/model/n");
    if (const Json* v = find(m, "mark"))
      sc.model.mark = parse_mark(get_string(*v, "/model/mark"), "/model/mark");
  }
  if (const Json* mart = find(root, "martingale")) {
    expect_object(*mart, "/martingale");
    check_keys(*mart, {"component", "m0", "m1", "mode"}, "/martingale");
    if (const Json* v = find(*mart, "component"))
      sc.martingale.component = get_count(*v, "/martingale/component");
    if (const Json* v = find(*mart, "m0"))
      sc.martingale.integrand.m0 = get_number(*v, "/martingale/m0");
    if (const Json* v = find(*mart, "m1"))
      sc.martingale.integrand.m1 = get_number(*v, "/martingale/m1");
    if (const Json* v = find(*mart, "mode")) {
      std::string mode = get_string(*v, "/martingale/mode");
      if (mode == "plain")
        sc.martingale.mode = DecomposeMode::Plain;
      else if (mode == "marked")
        sc.martingale.mode = DecomposeMode::Marked;
      else if (mode == "plugged_zero")
        sc.martingale.mode = DecomposeMode::Plugged;
      else
        fail("/martingale/mode", "unknown mode '" + mode +
                                     "' (expected plain | marked | plugged_zero)");
    }
  }
  {
    const Json& c = require(root, "checks", "/checks");
    if (!c.is_array()) fail("/checks", "expected an array of check names");
    for (std::size_t i = 0; i < c.size(); ++i)
      sc.checks.push_back(get_string(c[i], "/checks/" + std::to_string(i)));
  }
  if (const Json* v = find(root, "output")) sc.output_dir = get_string(*v, "/output");
  if (const Json* v = find(root, "emit_paths")) sc.emit_paths = get_count(*v, "/emit_paths");
  return sc;
}

void validate_scenario(const Scenario& sc) {
  if (!(sc.grid.horizon > 0.0)) fail("/grid/horizon", "must be positive");
  if (sc.grid.steps < 2 || sc.grid.steps > 100000) fail("/grid/steps", "must be in [2, 100000]");
  if (sc.ensemble.n_paths < 100 || sc.ensemble.n_paths > 2000000)
    fail("/ensemble/paths", "must be in [100, 2000000]");

  static const std::set<std::string> kinds = {"independent_exp", "cox_deterministic",
                                              "bridge_lognormal", "marked_bridge",
                                              "bridge_family"};
  if (!kinds.count(sc.model.kind))
    fail("/model/kind", "unknown kind '" + sc.model.kind +
                            "' (expected independent_exp | cox_deterministic | "
                            "bridge_lognormal | marked_bridge | bridge_family)");
  if (!(sc.model.rate > 0.0)) fail("/model/rate", "must be positive");
  if (sc.is_bridge()) {
    if (!(sc.model.anchor > 0.0)) fail("/model/anchor", "must be positive");
    if (sc.grid.horizon > 0.9 * sc.model.anchor * (1.0 + 1e-12))
      fail("/grid/horizon", "bridge scenarios need horizon <= 0.9 * anchor");
  }
  if (sc.is_family()) {
    if (sc.model.n < 1 || sc.model.n > 10) fail("/model/n", "must be in [1, 10]");
  } else if (sc.model.n != 1) {
    fail("/model/n", "only bridge_family scenarios may set n");
  }
  if (sc.model.kind == "marked_bridge" && sc.model.mark == MarkLaw::None)
    fail("/model/mark", "marked_bridge needs a mark law");
  if (sc.model.mark != MarkLaw::None && sc.model.kind != "marked_bridge" && !sc.is_family())
    fail("/model/mark", "marks are only supported by marked_bridge and bridge_family");

  std::size_t dim = sc.is_family() ? sc.model.n : 1;
  if (sc.martingale.component >= dim)
    fail("/martingale/component", "component index outside the driver dimension");
  if (sc.martingale.mode == DecomposeMode::Marked && sc.model.kind != "marked_bridge")
    fail("/martingale/mode", "marked mode requires model kind marked_bridge");

  if (sc.checks.empty()) fail("/checks", "at least one check is required");
  const auto& registry = check_registry();
  for (std::size_t i = 0; i < sc.checks.size(); ++i) {
    const std::string& name = sc.checks[i];
    auto it = registry.find(name);
    const std::string where = "/checks/" + std::to_string(i);
    if (it == registry.end()) fail(where, "unknown check '" + name + "'");
    if (!it->second.applicable(sc))
      fail(where, "check '" + name + "' does not apply: " + it->second.requires_text);
  }

  if (sc.emit_paths > sc.ensemble.n_paths)
    fail("/emit_paths", "cannot exceed the number of paths");
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("config error: cannot open '" + path + "'");
  Json root;
  try {
    root = Json::parse(in);
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("config parse error: ") + e.what());
  }
  return parse_scenario(root);
}

Json scenario_to_json(const Scenario& sc) {
  Json j;
  j["id"] = sc.id;
  j["grid"] = {{"horizon", sc.grid.horizon}, {"steps", sc.grid.steps}};
  j["ensemble"] = {{"paths", sc.ensemble.n_paths}, {"seed", sc.ensemble.seed}};
  Json model;
  model["kind"] = sc.model.kind;
  if (sc.model.kind == "independent_exp" || sc.model.kind == "cox_deterministic")
    model["rate"] = sc.model.rate;
  if (sc.is_bridge()) model["anchor"] = sc.model.anchor;
  if (sc.is_family()) model["n"] = sc.model.n;
  if (sc.model.mark != MarkLaw::None) model["mark"] = mark_name(sc.model.mark);
  j["model"] = std::move(model);
  j["martingale"] = {{"component", sc.martingale.component},
                     {"m0", sc.martingale.integrand.m0},
                     {"m1", sc.martingale.integrand.m1},
                     {"mode", mode_name(sc.martingale.mode)}};
  j["checks"] = sc.checks;
  j["output"] = sc.output_dir;
  j["emit_paths"] = sc.emit_paths;
  return j;
}

}  // namespace filtlab
