#pragma once

#include "orblab/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace orblab {

/// Configuration error carrying the offending line number.
class config_error : public std::runtime_error {
public:
    config_error(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

/// Flat "[section]" / "key = value" text; every key must be consumed by
/// the experiment that runs, unknown keys are rejected.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;

    std::string str(const std::string& section, const std::string& key) const;
    std::string str_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    Scalar scalar(const std::string& section, const std::string& key) const;
    Scalar scalar_or(const std::string& section, const std::string& key, Scalar fallback) const;
    long integer(const std::string& section, const std::string& key) const;
    long integer_or(const std::string& section, const std::string& key, long fallback) const;
    std::uint64_t u64_or(const std::string& section, const std::string& key,
                         std::uint64_t fallback) const;
    std::vector<Scalar> list(const std::string& section, const std::string& key) const;
    std::vector<Scalar> list_or(const std::string& section, const std::string& key,
                                const std::vector<Scalar>& fallback) const;
    /// "lo:hi" pairs separated by commas
    std::vector<std::pair<Scalar, Scalar>> ranges(const std::string& section,
                                                  const std::string& key) const;

    /// Throws config_error naming the first entry no experiment read.
    void ensure_consumed() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };
    std::map<std::string, Entry> entries_;
    std::vector<std::string> order_;

    const Entry* find(const std::string& section, const std::string& key) const;
    const Entry& require(const std::string& section, const std::string& key) const;
};

} // namespace orblab
