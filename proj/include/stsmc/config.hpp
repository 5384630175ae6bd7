#pragma once

#include <string>

#include "stsmc/simulator.hpp"

namespace stsmc {

/// Parses a scenario document (TOML subset, see docs/config.md). Unspecified
/// fields keep their defaults. Throws ConfigError naming the key and line.
ScenarioConfig parse_config(const std::string& text);

/// Reads and parses a file. Throws FileNotFoundError if it cannot be opened.
ScenarioConfig load_config(const std::string& path);

/// Sets one field from a dotted key ("observer.kappa", "mode") and a value
/// written as in the document; bare words are taken as strings. Does not
/// re-validate the whole scenario.
void apply_override(ScenarioConfig& cfg, const std::string& key, const std::string& value);

}  // namespace stsmc
