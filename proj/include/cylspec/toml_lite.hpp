#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

namespace cylspec {

/// Parses the TOML subset used by study configs: [table] headers, key =
/// value lines, strings, integers, floats, booleans, arrays (may span lines)
/// and inline tables; '#' starts a comment. Throws ConfigError with the line
/// number on malformed input or duplicate keys.
nlohmann::ordered_json parse_toml_lite(std::string_view text);

/// Reads a config file; ".json" files are parsed as JSON, others as TOML.
nlohmann::ordered_json read_config_file(const std::string& path);

}  // namespace cylspec
