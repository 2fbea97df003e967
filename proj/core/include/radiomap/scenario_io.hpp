#pragma once

#include <string>

#include "radiomap/simulator.hpp"

namespace radiomap {

// Scenario files are JSON with a schema_version field; parsing is strict
// (unknown keys are errors). See README for the documented schema.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);
void save_scenario(const std::string& path, const ScenarioConfig& cfg);

}  // namespace radiomap
