#include "logconvex/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace logconvex {

namespace {

enum class Kind { Int, Real, Str, Bool, Seed, RealList };

struct SchemaEntry {
    const char* key;
    Kind kind;
    const char* def;
};

// the full key surface; everything else is rejected
const SchemaEntry kSchema[] = {
    {"experiment", Kind::Str, "heat-logconvexity"},
    {"seed", Kind::Seed, "1"},
    {"replicates", Kind::Int, "1"},

    {"noise.J", Kind::Int, "4"},
    {"noise.sigma", Kind::Real, "0.2"},
    {"noise.decay_p", Kind::Real, "2"},
    {"noise.seed", Kind::Seed, "0"},  // 0: derive from the master seed

    {"problem.name", Kind::Str, "heat"},
    {"problem.T", Kind::Real, "1"},
    {"problem.gamma_check_samples", Kind::Int, "200"},

    {"grid.n", Kind::Int, "128"},
    {"time.dt", Kind::Real, "0.001"},
    {"time.T", Kind::Real, "1"},

    {"heat.n_mixture", Kind::Int, "256"},
    {"heat.dt_mixture", Kind::Real, "0.0001"},

    {"backward.consistency_seeds", Kind::Int, "10"},
    {"backward.dt_levels", Kind::Int, "3"},
    {"backward.seeds", Kind::Int, "20"},
    {"backward.sigmas", Kind::RealList, "0,0.05,0.1,0.15,0.2"},
    {"backward.t0", Kind::Real, "0.25"},

    {"diag.C1", Kind::Real, "1"},
    {"diag.C2", Kind::Real, "1"},
    {"diag.C3", Kind::Real, "1"},
    {"diag.C4", Kind::Real, "1"},

    {"control.target", Kind::Str, "sin1"},
    {"control.reg", Kind::Real, "1e-12"},
    {"control.eps", Kind::Real, "1e-06"},
    {"control.n", Kind::Int, "32"},
    {"control.dt", Kind::Real, "0.0001"},
    {"control.T_sweep", Kind::RealList, "0.01,0.02,0.03,0.04,0.05"},
    {"control.duality_pairs", Kind::Int, "100"},
    {"control.duality_T", Kind::Real, "0.2"},
    {"control.duality_dt", Kind::Real, "0.001"},

    {"nse.K", Kind::Int, "8"},
    {"nse.N_tame", Kind::Real, "10"},
    {"nse.nu", Kind::Real, "1"},
    {"nse.dt", Kind::Real, "0.0005"},
    {"nse.T", Kind::Real, "0.5"},
    {"nse.paths", Kind::Int, "200"},
    {"nse.eps", Kind::Real, "1e-08"},
    {"nse.sigma", Kind::Real, "0.1"},
    {"nse.noise_J", Kind::Int, "8"},
    {"nse.gamma_every", Kind::Int, "5"},
    {"nse.tame", Kind::Bool, "true"},
    {"nse.C_grid_max", Kind::Real, "10"},
    {"nse.C_grid_step", Kind::Real, "0.5"},
    {"nse.test_times", Kind::Int, "10"},
    {"nse.interp_fields", Kind::Int, "100"},
};

const SchemaEntry* find_entry(const std::string& key) {
    for (const auto& e : kSchema)
        if (key == e.key) return &e;
    return nullptr;
}

std::string canon_real(const std::string& raw, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': '" + raw + "' is not a number");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string canonicalize(const SchemaEntry& e, const std::string& raw) {
    switch (e.kind) {
        case Kind::Int: {
            char* end = nullptr;
            const long v = std::strtol(raw.c_str(), &end, 10);
            if (end == raw.c_str() || *end != '\0')
                throw ConfigError(std::string("key '") + e.key + "': '" + raw +
                                  "' is not an integer");
            return std::to_string(v);
        }
        case Kind::Seed: {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(raw.c_str(), &end, 10);
            if (end == raw.c_str() || *end != '\0')
                throw ConfigError(std::string("key '") + e.key + "': '" + raw +
                                  "' is not a seed");
            return std::to_string(v);
        }
        case Kind::Real:
            return canon_real(raw, e.key);
        case Kind::RealList: {
            std::string out;
            std::stringstream ss(raw);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!out.empty()) out += ",";
                out += canon_real(item, e.key);
            }
            if (out.empty())
                throw ConfigError(std::string("key '") + e.key + "': empty list");
            return out;
        }
        case Kind::Bool: {
            if (raw == "true" || raw == "1" || raw == "on") return "true";
            if (raw == "false" || raw == "0" || raw == "off") return "false";
            throw ConfigError(std::string("key '") + e.key + "': '" + raw +
                              "' is not a boolean");
        }
        case Kind::Str:
            return raw;
    }
    return raw;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::defaults() {
    Config c;
    for (const auto& e : kSchema) c.values_[e.key] = canonicalize(e, e.def);
    return c;
}

Config Config::parse_text(const std::string& text, const std::string& source) {
    Config c = defaults();
    std::stringstream ss(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + t + "'");
        std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        // dotted keys are fully qualified; the section prefixes bare keys
        if (!section.empty() && key.find('.') == std::string::npos)
            key = section + "." + key;
        const SchemaEntry* e = find_entry(key);
        if (e == nullptr)
            throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
        try {
            c.values_[key] = canonicalize(*e, value);
        } catch (const ConfigError& err) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": " + err.what());
        }
    }
    return c;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_text(buf.str(), path);
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& Config::gets(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
    return it->second;
}

int Config::geti(const std::string& key) const { return std::stoi(gets(key)); }
double Config::getd(const std::string& key) const { return std::stod(gets(key)); }
bool Config::getb(const std::string& key) const { return gets(key) == "true"; }

std::uint64_t Config::get_seed(const std::string& key) const {
    return std::stoull(gets(key));
}

std::vector<double> Config::get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(gets(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    const SchemaEntry* e = find_entry(key);
    if (e == nullptr) throw ConfigError("unknown key '" + key + "'");
    values_[key] = canonicalize(*e, value);
}

std::string Config::serialize() const {
    std::string out;
    for (const auto& [k, v] : values_) {  // std::map: already sorted
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

}  // namespace logconvex
