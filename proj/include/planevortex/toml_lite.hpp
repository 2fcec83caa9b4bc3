#pragma once
// Minimal TOML-subset reader producing JSON values: top-level keys and
// [table] / [a.b] sections, scalars (string, bool, integer, float), and
// arrays (which may span lines until the brackets balance). Documents whose
// first non-space character is '{' are parsed as plain JSON instead, so both
// config formats share one entry point.

#include <string>

#include "json.hpp"

namespace pv {

nlohmann::json parse_config_text(const std::string& text);

// Reads and parses a config file; throws std::runtime_error with the file
// name and line number on any syntax problem.
nlohmann::json load_config(const std::string& path);

}  // namespace pv
