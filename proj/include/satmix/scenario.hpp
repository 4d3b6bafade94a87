#pragma once

#include <string>
#include <vector>

#include "satmix/sim.hpp"

namespace satmix {

// Strict parse: unknown keys, wrong types, and out-of-range values all raise
// ConfigError naming the offending field. emit(parse(s)) round-trips.
ScenarioConfig parse_scenario(const std::string& json_text);
ScenarioConfig load_scenario_file(const std::string& path);
std::string emit_scenario(const ScenarioConfig& cfg);

// Built-in catalog. Every full-scale entry has a "-desk" variant that runs
// in seconds. Throws ConfigError for unknown names.
std::vector<std::string> builtin_scenario_names();
bool is_builtin_scenario(const std::string& name);
ScenarioConfig builtin_scenario(const std::string& name);

// Resolves a CLI argument: built-in name first, then filesystem path.
ScenarioConfig resolve_scenario(const std::string& name_or_path);

}  // namespace satmix
