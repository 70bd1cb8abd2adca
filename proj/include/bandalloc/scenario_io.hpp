#pragma once

#include <string>
#include <string_view>

#include "bandalloc/model.hpp"

namespace bandalloc::io {

// Parses a YAML scenario document. Schema violations and unknown keys raise
// ConfigError with a "<source>:<line>:" prefix.
Scenario parse_scenario(std::string_view text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

// Canonical YAML form: fixed key order, shortest round-trip number formatting.
// parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& scenario);

// Lowercase hex SHA-256 of emit_scenario(scenario).
std::string scenario_digest(const Scenario& scenario);

// Shortest decimal text that reads back as the same double.
std::string format_number(double value);

}  // namespace bandalloc::io
