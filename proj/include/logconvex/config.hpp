#pragma once

/// Strict key = value experiment configuration. Unknown keys are rejected
/// with line-precise messages; values are canonicalized at parse time so
/// serialize(parse(serialize(cfg))) is byte-identical.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "logconvex/errors.hpp"

namespace logconvex {

class Config {
  public:
    /// All schema keys at their defaults.
    static Config defaults();
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text, const std::string& source = "<text>");

    bool has(const std::string& key) const;
    int geti(const std::string& key) const;
    double getd(const std::string& key) const;
    bool getb(const std::string& key) const;
    const std::string& gets(const std::string& key) const;
    std::vector<double> get_list(const std::string& key) const;  // comma-separated
    std::uint64_t get_seed(const std::string& key) const;

    /// Validates against the schema and canonicalizes the value.
    void set(const std::string& key, const std::string& value);

    /// Normal form: every key, sorted, canonical values.
    std::string serialize() const;

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace logconvex
