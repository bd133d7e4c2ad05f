#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hexice/lattice.hpp"
#include "hexice/params.hpp"

namespace hexice {

/// Everything a sweep or single-point run needs.  The temperature grid is
/// kept as (tmin, tmax, tstep) and expanded on demand.
struct SweepConfig {
    ModelParams params{};
    double eta = 0.01;      // bath coupling
    double omega_c = 100.0; // bath cutoff, meV
    double tmin = 2.0;      // K
    double tmax = 150.0;    // K
    double tstep = 1.0;     // K
    std::vector<std::pair<int, int>> pairs{{1, 2}, {2, 3}};
    std::string output_dir = "out";
    bool lamb_shift = false;

    std::vector<double> temperature_grid() const {
        validate();
        std::vector<double> grid;
        for (int k = 0;; ++k) {
            const double T = tmin + k * tstep;
            if (T > tmax + 1e-9) break;
            grid.push_back(T);
        }
        return grid;
    }

    void validate() const {
        params.validate();
        if (!(eta > 0.0) || !(omega_c > 0.0))
            throw std::invalid_argument("config: eta and omega_c must be positive");
        if (!(tmin > 0.0) || !(tstep > 0.0) || !(tmax >= tmin))
            throw std::invalid_argument(
                "config: need tmin > 0, tstep > 0, tmax >= tmin");
        for (const auto& [i, j] : pairs)
            if (i < 1 || i > n_sites || j < 1 || j > n_sites || i == j)
                throw std::invalid_argument(
                    "config: pairs must name distinct sites in 1..12");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty())
        throw std::invalid_argument("config: bad number for '" + key + "': " + v);
    return x;
}

inline int parse_site(const std::string& v, const std::string& what) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty())
        throw std::invalid_argument("config: bad site index in " + what);
    return static_cast<int>(x);
}

} // namespace detail

/// Pair list in the "1:2,2:3" form used by the config file and --pairs.
inline std::vector<std::pair<int, int>> parse_pairs(const std::string& text) {
    std::vector<std::pair<int, int>> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = detail::trim(text.substr(start, comma - start));
        if (item.empty())
            throw std::invalid_argument("config: empty entry in pair list");
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("config: pair '" + item +
                                        "' is not of the form i:j");
        out.emplace_back(detail::parse_site(item.substr(0, colon), item),
                         detail::parse_site(item.substr(colon + 1), item));
        start = comma + 1;
        if (comma == text.size()) break;
    }
    return out;
}

/// Applies one key to the config; keys mirror the struct fields.
inline void apply_config_value(SweepConfig& cfg, const std::string& key,
                               const std::string& value) {
    using detail::parse_double;
    if (key == "W") cfg.params.W = parse_double(value, key);
    else if (key == "J") cfg.params.J = parse_double(value, key);
    else if (key == "V_inter") cfg.params.V_inter = parse_double(value, key);
    else if (key == "V_intra") cfg.params.V_intra = parse_double(value, key);
    else if (key == "lambda") cfg.params.lambda = parse_double(value, key);
    else if (key == "eta") cfg.eta = parse_double(value, key);
    else if (key == "omega_c") cfg.omega_c = parse_double(value, key);
    else if (key == "tmin") cfg.tmin = parse_double(value, key);
    else if (key == "tmax") cfg.tmax = parse_double(value, key);
    else if (key == "tstep") cfg.tstep = parse_double(value, key);
    else if (key == "pairs") cfg.pairs = parse_pairs(value);
    else if (key == "out") cfg.output_dir = value;
    else if (key == "lamb_shift") {
        if (value == "true") cfg.lamb_shift = true;
        else if (value == "false") cfg.lamb_shift = false;
        else throw std::invalid_argument("config: lamb_shift must be true or false");
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

/// Flat key-value file: `key = value` lines, # comments, optional quotes
/// around string values.  Section headers are rejected to keep the format
/// an honest subset.
inline SweepConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open '" + path + "'");
    SweepConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[')
            throw std::invalid_argument("config: sections are not supported (line " +
                                        std::to_string(lineno) + ")");
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value (line " +
                                        std::to_string(lineno) + ")");
        const std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (key.empty() || value.empty())
            throw std::invalid_argument("config: empty key or value (line " +
                                        std::to_string(lineno) + ")");
        apply_config_value(cfg, key, value);
    }
    return cfg;
}

} // namespace hexice
