#pragma once

// Flat INI-style run configuration: [section] headers, key = value pairs,
// '#' comments, UTF-8. Unknown sections or keys are rejected so that a
// typo cannot silently fall back to a default.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fcalc/symbols.hpp"

namespace fcalc {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class RunConfig {
public:
    static RunConfig parse(std::istream& is) {
        RunConfig cfg;
        std::string line, section;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw config_error("config line " + std::to_string(lineno) + ": malformed section header");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                if (!schema().contains(section))
                    throw config_error("config: unknown section [" + section + "]");
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
            if (section.empty())
                throw config_error("config line " + std::to_string(lineno) + ": key outside any section");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (!schema().at(section).contains(key))
                throw config_error("config: unknown key '" + key + "' in section [" + section + "]");
            cfg.values_[section + "." + key] = value;
        }
        return cfg;
    }

    static RunConfig parse_string(const std::string& text) {
        std::istringstream is(text);
        return parse(is);
    }

    static RunConfig parse_file(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw config_error("cannot open config file " + path);
        return parse(is);
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.contains(section + "." + key);
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        const auto it = values_.find(section + "." + key);
        return it == values_.end() ? fallback : it->second;
    }

    std::string require_string(const std::string& section, const std::string& key) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw config_error("config: missing required key '" + key + "' in section [" + section + "]");
        return it->second;
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const auto it = values_.find(section + "." + key);
        return it == values_.end() ? fallback : to_double(it->second, section, key);
    }

    double require_double(const std::string& section, const std::string& key) const {
        return to_double(require_string(section, key), section, key);
    }

    int get_int(const std::string& section, const std::string& key, int fallback) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end()) return fallback;
        const double v = to_double(it->second, section, key);
        if (v != static_cast<int>(v))
            throw config_error("config: key '" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    int require_int(const std::string& section, const std::string& key) const {
        const double v = require_double(section, key);
        if (v != static_cast<int>(v))
            throw config_error("config: key '" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw config_error("config: key '" + key + "' must be true or false");
    }

    // "auto" (or absence) maps to an unset optional
    std::optional<double> get_auto_double(const std::string& section, const std::string& key) const {
        const auto it = values_.find(section + "." + key);
        if (it == values_.end() || it->second == "auto") return std::nullopt;
        return to_double(it->second, section, key);
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    }

    static double to_double(const std::string& v, const std::string& section, const std::string& key) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw config_error("config: key '" + key + "' in [" + section + "] is not a number: " + v);
        }
    }

    static const std::map<std::string, std::set<std::string>>& schema() {
        static const std::map<std::string, std::set<std::string>> s = {
            {"grid", {"n", "N", "L"}},
            {"symbol",
             {"kind", "gamma", "m", "c", "kappa", "beta", "s", "mu", "multiplier", "r"}},
            {"equation",
             {"preset", "delta", "p", "alpha", "kappa", "rho_amplitude", "rho_width",
              "d_amplitude", "d_width", "delta_growth", "beta_pow", "s_nls", "mu_nls", "p_pow",
              "split", "forcing", "forcing_amplitude", "forcing_width", "cutoff_width", "initial",
              "initial_amplitude", "initial_width"}},
            {"solver",
             {"tol_step", "tol_residual", "max_iter", "max_iter_contraction", "damping", "epsilon",
              "n_emb", "m_reg", "trials"}},
            {"output", {"emit_solution", "emit_history", "emit_constants"}},
        };
        return s;
    }

    std::map<std::string, std::string> values_;
};

// Symbol named by the [symbol] section.
inline Symbol symbol_from_config(const RunConfig& cfg) {
    const std::string kind = cfg.require_string("symbol", "kind");
    Symbol sym;
    if (kind == "laplace") {
        sym = laplace_symbol();
    } else if (kind == "fractional") {
        sym = fractional_symbol(cfg.require_double("symbol", "gamma"),
                                cfg.get_double("symbol", "m", 1.0));
    } else if (kind == "exp") {
        sym = exp_symbol(cfg.get_double("symbol", "c", 1.0));
    } else if (kind == "oscillatory") {
        sym = oscillatory_symbol();
    } else if (kind == "power") {
        sym = power_symbol(cfg.require_double("symbol", "gamma"),
                           cfg.get_double("symbol", "kappa", 1.0));
    } else {
        throw config_error("config: unknown symbol kind '" + kind + "'");
    }
    if (cfg.has("symbol", "beta")) {
        const double beta = cfg.require_double("symbol", "beta");
        if (!(beta > 0.0)) throw config_error("config: symbol beta must be positive");
        sym.beta = beta;
    }
    return sym;
}

} // namespace fcalc
