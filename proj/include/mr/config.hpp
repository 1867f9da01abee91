#pragma once

#include <string>

#include <json.hpp>

namespace mr {

/// Parses the TOML subset used by experiment configs: [section] / [a.b]
/// headers, `key = value` lines, strings, numbers, booleans, and (nested)
/// arrays. Comments start with '#'.
nlohmann::json parse_toml(const std::string& text);

/// Loads a config file; .toml selects the TOML parser, anything else is JSON.
nlohmann::json load_config_file(const std::string& path);

}  // namespace mr
