#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "edflow/io.hpp"
#include "edflow/scenario.hpp"

namespace edflow {

struct Preset {
  std::string name;
  std::string description;
  ScenarioSpec spec;
};

inline std::vector<Preset> builtin_presets() {
  return {{"baseline", "Calibrated week of normal operation, no exogenous surge.",
           baseline_scenario()},
          {"stressed",
           "Baseline plus a 3 h surge pulse starting on day 2, with a delayed rise in the "
           "admit fraction; activates the Code Help protocol once.",
           stressed_scenario()}};
}

inline ScenarioSpec builtin_preset(const std::string& name) {
  for (auto& p : builtin_presets())
    if (p.name == name) return p.spec;
  throw ValidationError("preset", "unknown preset '" + name + "' (expected baseline or stressed)");
}

// Reads <dir>/<name>.json when it exists; a preset file may omit any field,
// which then takes the built-in default. Falls back to the built-in preset.
inline ScenarioSpec load_preset(const std::string& name, const std::string& dir = "") {
  if (!dir.empty()) {
    auto path = std::filesystem::path(dir) / (name + ".json");
    if (std::filesystem::exists(path)) {
      ScenarioSpec defaults = baseline_scenario();
      for (auto& p : builtin_presets())
        if (p.name == name) defaults = p.spec;
      return scenario_from_json(read_json_file(path.string()), defaults);
    }
  }
  return builtin_preset(name);
}

}  // namespace edflow
