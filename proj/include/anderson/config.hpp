#pragma once

// Flat key-value experiment configuration. Format: optional [section]
// headers naming the experiment, `key = value` lines, `#` comments.
// Unknown keys are rejected before any computation runs.

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace anderson {
namespace cfg {

struct ConfigError : std::runtime_error {
    std::string code;  // machine-readable class: ECONFIG, EHURST, EGRID
    ConfigError(std::string code_, const std::string& what)
        : std::runtime_error(what), code(std::move(code_)) {}
};

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(uint8_t(s[a]))) ++a;
    while (b > a && std::isspace(uint8_t(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct KeyValues {
    std::string section;
    std::map<std::string, std::string> values;
    mutable std::set<std::string> consumed;

    bool has(const std::string& key) const { return values.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        consumed.insert(key);
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
    double get_double(const std::string& key, double fallback) const {
        consumed.insert(key);
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError("ECONFIG", "bad numeric value for key '" + key + "': " + it->second);
        }
    }
    long get_long(const std::string& key, long fallback) const {
        const double v = get_double(key, double(fallback));
        const long l = long(v);
        if (double(l) != v) throw ConfigError("ECONFIG", "key '" + key + "' must be an integer");
        return l;
    }
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const {
        consumed.insert(key);
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            try {
                out.push_back(std::stod(tok));
            } catch (...) {
                throw ConfigError("ECONFIG", "bad list entry for key '" + key + "': " + tok);
            }
        }
        if (out.empty()) throw ConfigError("ECONFIG", "empty list for key '" + key + "'");
        return out;
    }

    // Call after all gets: any untouched key is a schema violation.
    void reject_unknown() const {
        for (const auto& kv : values)
            if (!consumed.count(kv.first))
                throw ConfigError("ECONFIG", "unknown config key '" + kv.first + "'" +
                                                 (section.empty() ? "" : " in [" + section + "]"));
    }
};

inline KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("ECONFIG", "malformed section header at line " +
                                                 std::to_string(lineno));
            if (!kv.section.empty())
                throw ConfigError("ECONFIG", "multiple sections in one config (line " +
                                                 std::to_string(lineno) + ")");
            kv.section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("ECONFIG", "expected key = value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("ECONFIG", "empty key at line " + std::to_string(lineno));
        if (kv.values.count(key))
            throw ConfigError("ECONFIG", "duplicate key '" + key + "' at line " +
                                             std::to_string(lineno));
        kv.values[key] = val;
    }
    return kv;
}

inline KeyValues parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("ECONFIG", "cannot open config file: " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace cfg
}  // namespace anderson
