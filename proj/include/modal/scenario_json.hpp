// scenario_json.hpp — the scenario file schema consumed by the CLI.
#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>

#include "modal/scenario.hpp"

namespace modal {

// Strict parse: required fields per model, unknown fields rejected.
// Throws ValidationError with a field-level message on any violation.
Scenario parse_scenario(const nlohmann::json& doc);

// Read and parse a scenario file; JSON syntax errors are rethrown as
// ValidationError carrying the parser's position diagnostics.
Scenario load_scenario(const std::string& path);

}  // namespace modal
