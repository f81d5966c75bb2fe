#include "flexgate/harness/toml.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace flexgate::harness {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Cuts a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

struct ValueParser {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    Result<TomlValue, std::string> parse() {
        skip_ws();
        if (pos >= text.size()) return std::string("missing value");
        char c = text[pos];
        if (c == '"') return parse_string();
        if (c == '[') return parse_array();
        return parse_scalar();
    }

    Result<TomlValue, std::string> parse_string() {
        ++pos;
        std::string out;
        while (pos < text.size() && text[pos] != '"') out.push_back(text[pos++]);
        if (pos >= text.size()) return std::string("unterminated string");
        ++pos;
        return TomlValue::of(std::move(out));
    }

    Result<TomlValue, std::string> parse_array() {
        ++pos;
        TomlValue out;
        out.kind = TomlValue::Kind::Array;
        skip_ws();
        if (pos < text.size() && text[pos] == ']') {
            ++pos;
            return out;
        }
        for (;;) {
            auto item = parse();
            if (!item) return item.error();
            out.items.push_back(std::move(item).take());
            skip_ws();
            if (pos >= text.size()) return std::string("unterminated array");
            if (text[pos] == ',') {
                ++pos;
                continue;
            }
            if (text[pos] == ']') {
                ++pos;
                return out;
            }
            return std::string("expected ',' or ']' in array");
        }
    }

    Result<TomlValue, std::string> parse_scalar() {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ',' && text[pos] != ']') ++pos;
        std::string token = trim(text.substr(start, pos - start));
        if (token == "true") return TomlValue::of(true);
        if (token == "false") return TomlValue::of(false);
        try {
            std::size_t used = 0;
            double n = std::stod(token, &used);
            if (used != token.size()) return std::string("bad number '" + token + "'");
            return TomlValue::of(n);
        } catch (const std::exception&) {
            return std::string("bad value '" + token + "'");
        }
    }
};

}  // namespace

Result<TomlTable, ConfigError> parse_toml(std::istream& in) {
    TomlTable table;
    std::string section;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') return ConfigError{lineno, "unterminated section header"};
            section = trim(body.substr(1, body.size() - 2));
            if (section.empty()) return ConfigError{lineno, "empty section name"};
            table.try_emplace(section);
            continue;
        }
        auto eq = body.find('=');
        if (eq == std::string::npos) return ConfigError{lineno, "expected 'key = value'"};
        std::string key = trim(body.substr(0, eq));
        if (key.empty()) return ConfigError{lineno, "empty key"};
        if (section.empty()) return ConfigError{lineno, "key '" + key + "' outside any section"};
        std::string rest = body.substr(eq + 1);
        ValueParser vp{rest};
        auto value = vp.parse();
        if (!value) return ConfigError{lineno, value.error()};
        if (!vp.at_end()) return ConfigError{lineno, "trailing characters after value"};
        table[section][key] = std::move(value).take();
    }
    return table;
}

Result<TomlTable, ConfigError> parse_toml_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) return ConfigError{0, "cannot open " + path};
    return parse_toml(f);
}

}  // namespace flexgate::harness
