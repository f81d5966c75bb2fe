#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "flexgate/common/result.hpp"
#include "flexgate/plant/traces.hpp"

namespace flexgate::harness {

using ConfigError = plant::IngestError;

// Value in the config grammar: string, bool, number, or array of values.
struct TomlValue {
    enum class Kind : std::uint8_t { Bool, Number, String, Array };

    Kind kind = Kind::Number;
    bool boolean = false;
    double number = 0;
    std::string text;
    std::vector<TomlValue> items;

    static TomlValue of(bool b) { return TomlValue{Kind::Bool, b, 0, {}, {}}; }
    static TomlValue of(double n) { return TomlValue{Kind::Number, false, n, {}, {}}; }
    static TomlValue of(std::string s) {
        return TomlValue{Kind::String, false, 0, std::move(s), {}};
    }
};

// section -> key -> value
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

// Parses the TOML subset used for run configs: [section] headers, key =
// value lines, '#' comments, values limited to quoted strings, booleans,
// numbers and (nested) arrays. Errors carry 1-based line numbers.
Result<TomlTable, ConfigError> parse_toml(std::istream& in);
Result<TomlTable, ConfigError> parse_toml_file(const std::string& path);

}  // namespace flexgate::harness
