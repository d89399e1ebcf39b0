#include "orblab/config.hpp"

#include <fstream>
#include <sstream>

namespace orblab {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path, 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error("unterminated section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw config_error("empty section name", lineno);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error("expected key = value", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("empty key", lineno);
        if (section.empty()) throw config_error("key outside any [section]", lineno);
        const std::string full = section + "." + key;
        if (cfg.entries_.count(full)) throw config_error("duplicate key " + full, lineno);
        cfg.entries_[full] = Entry{value, lineno, false};
        cfg.order_.push_back(full);
    }
    return cfg;
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    const auto it = entries_.find(section + "." + key);
    if (it == entries_.end()) return nullptr;
    it->second.consumed = true;
    return &it->second;
}

const Config::Entry& Config::require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) throw config_error("missing required key " + section + "." + key, 0);
    return *e;
}

bool Config::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string Config::str(const std::string& section, const std::string& key) const {
    return require(section, key).value;
}

std::string Config::str_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

namespace {
Scalar parse_scalar(const std::string& v, int line) {
    std::size_t used = 0;
    Scalar out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw config_error("expected a number, got '" + v + "'", line);
    }
    if (used != v.size()) throw config_error("trailing characters in number '" + v + "'", line);
    return out;
}
} // namespace

Scalar Config::scalar(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    return parse_scalar(e.value, e.line);
}

Scalar Config::scalar_or(const std::string& section, const std::string& key,
                         Scalar fallback) const {
    const Entry* e = find(section, key);
    return e ? parse_scalar(e->value, e->line) : fallback;
}

long Config::integer(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    const Scalar v = parse_scalar(e.value, e.line);
    const long out = static_cast<long>(v);
    if (static_cast<Scalar>(out) != v) throw config_error("expected an integer", e.line);
    return out;
}

long Config::integer_or(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? integer(section, key) : fallback;
}

std::uint64_t Config::u64_or(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    try {
        return std::stoull(e->value);
    } catch (const std::exception&) {
        throw config_error("expected an unsigned integer", e->line);
    }
}

std::vector<Scalar> Config::list(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    std::vector<Scalar> out;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) throw config_error("empty list item", e.line);
        out.push_back(parse_scalar(t, e.line));
    }
    if (out.empty()) throw config_error("empty list", e.line);
    return out;
}

std::vector<Scalar> Config::list_or(const std::string& section, const std::string& key,
                                    const std::vector<Scalar>& fallback) const {
    return has(section, key) ? list(section, key) : fallback;
}

std::vector<std::pair<Scalar, Scalar>> Config::ranges(const std::string& section,
                                                      const std::string& key) const {
    const Entry& e = require(section, key);
    std::vector<std::pair<Scalar, Scalar>> out;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) {
        const std::string t = trim(item);
        const auto colon = t.find(':');
        if (colon == std::string::npos) throw config_error("expected lo:hi ranges", e.line);
        out.emplace_back(parse_scalar(trim(t.substr(0, colon)), e.line),
                         parse_scalar(trim(t.substr(colon + 1)), e.line));
    }
    if (out.empty()) throw config_error("empty range list", e.line);
    return out;
}

void Config::ensure_consumed() const {
    for (const std::string& full : order_) {
        const Entry& e = entries_.at(full);
        if (!e.consumed) throw config_error("unknown key " + full, e.line);
    }
}

} // namespace orblab
