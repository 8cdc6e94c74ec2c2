#pragma once

// Run-configuration files: a strict INI-style format with nested sections for
// the degree model, the weight model and the experiment. Unknown sections or
// keys are errors.
//
//   [experiment]
//   kind = typical_time
//   n = 1000,10000
//   replicas = 500
//   seed = 1
//   [degree]
//   pmf = 3:1.0
//   [weight]
//   family = power_near_zero
//   a = 1.0
//   atom = critical

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfpp/distributions.hpp"

namespace cfpp {

struct ExperimentConfig {
    std::string kind = "typical_time";
    std::vector<std::int64_t> n_grid;
    std::int64_t replicas = 1;
    std::uint64_t seed = 0;
    double lambda = 0.0;  // critical-window offset: p = p_c + lambda * n^{-1/3}
    int workers = 1;
    std::string out;

    // kind-specific knobs, all with defaults
    std::int64_t ell = 1000;          // theta truncation index
    std::int64_t walks = 1'000'000;   // cluster-walk count
    std::uint64_t cap = 100'000;      // per-walk step cap
    int mmax = 20;                    // kemperman pmf range
    std::int64_t top_clusters = 5;    // census ranks exported
    std::vector<double> epsilons{0.01, 0.05, 0.1};

    std::optional<DegreeModel> degree;
    std::optional<WeightModel> weight;

    std::string canonical_text;  // normalized config text, hashed into outputs
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, delim)) out.push_back(trim(item));
    return out;
}

inline double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad numeric value for '" + key + "': " + s);
    }
}

inline std::int64_t to_int(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad integer value for '" + key + "': " + s);
    }
}

} // namespace detail

inline const std::set<std::string>& known_experiment_kinds() {
    static const std::set<std::string> kinds{
        "typical_time", "flood",         "cluster_tails", "kemperman_check",
        "explosion",    "coupling_tv",   "isolated_path", "scaling_window",
        "conjecture_zero_one", "conjecture_loglog"};
    return kinds;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    static const std::map<std::string, std::set<std::string>> schema{
        {"experiment",
         {"kind", "n", "replicas", "seed", "lambda", "workers", "out", "ell",
          "walks", "cap", "mmax", "top_clusters", "epsilons"}},
        {"degree", {"pmf", "tail_exponent"}},
        {"weight", {"family", "a", "b", "gamma", "rate", "c", "samples", "atom"}},
    };

    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string current;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config: malformed section at line " +
                                         std::to_string(lineno));
            current = detail::trim(line.substr(1, line.size() - 2));
            if (schema.find(current) == schema.end())
                throw std::runtime_error("config: unknown section [" + current + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || current.empty())
            throw std::runtime_error("config: expected key = value at line " +
                                     std::to_string(lineno));
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (schema.at(current).count(key) == 0)
            throw std::runtime_error("config: unknown key '" + key +
                                     "' in section [" + current + "]");
        sections[current][key] = value;
    }

    ExperimentConfig cfg;

    // Degree model first: the weight atom may reference its p_c.
    if (sections.count("degree")) {
        const auto& sec = sections["degree"];
        if (!sec.count("pmf")) throw std::runtime_error("config: [degree] needs pmf");
        std::map<int, double> pmf;
        for (const auto& entry : detail::split(sec.at("pmf"), ',')) {
            const auto parts = detail::split(entry, ':');
            if (parts.size() != 2)
                throw std::runtime_error("config: degree pmf entries are k:prob");
            pmf[static_cast<int>(detail::to_int(parts[0], "pmf"))] =
                detail::to_double(parts[1], "pmf");
        }
        const double tail = sec.count("tail_exponent")
                                ? detail::to_double(sec.at("tail_exponent"), "tail_exponent")
                                : 0.0;
        cfg.degree.emplace(pmf, tail);
    }

    if (sections.count("weight")) {
        const auto& sec = sections["weight"];
        if (!sec.count("family"))
            throw std::runtime_error("config: [weight] needs family");
        const std::string family = sec.at("family");

        double atom = 0.0;
        if (!sec.count("atom") || sec.at("atom") == "critical") {
            if (!cfg.degree)
                throw std::runtime_error(
                    "config: weight atom 'critical' needs a degree model");
            atom = cfg.degree->p_c();
        } else {
            atom = detail::to_double(sec.at("atom"), "atom");
        }

        auto param = [&](const char* key) {
            if (!sec.count(key))
                throw std::runtime_error(std::string("config: weight family ") +
                                         family + " needs parameter " + key);
            return detail::to_double(sec.at(key), key);
        };
        std::optional<PositiveLaw> law;
        if (family == "power_near_zero")
            law = PositiveLaw::power_near_zero(param("a"), atom);
        else if (family == "exp_stretch")
            law = PositiveLaw::exp_stretch(param("b"), atom);
        else if (family == "double_exp")
            law = PositiveLaw::double_exp(param("gamma"));
        else if (family == "exponential")
            law = PositiveLaw::exponential(param("rate"));
        else if (family == "point_mass")
            law = PositiveLaw::point_mass(param("c"));
        else if (family == "empirical") {
            if (!sec.count("samples"))
                throw std::runtime_error("config: empirical family needs samples");
            std::vector<double> samples;
            for (const auto& s : detail::split(sec.at("samples"), ','))
                samples.push_back(detail::to_double(s, "samples"));
            law = PositiveLaw::empirical(std::move(samples));
        } else {
            throw std::runtime_error("config: unknown weight family " + family);
        }
        cfg.weight.emplace(atom, std::move(*law));
    }

    if (sections.count("experiment")) {
        const auto& sec = sections["experiment"];
        auto get = [&](const char* key) -> std::optional<std::string> {
            const auto it = sec.find(key);
            if (it == sec.end()) return std::nullopt;
            return it->second;
        };
        if (auto v = get("kind")) {
            if (known_experiment_kinds().count(*v) == 0)
                throw std::runtime_error("config: unknown experiment kind " + *v);
            cfg.kind = *v;
        }
        if (auto v = get("n")) {
            for (const auto& s : detail::split(*v, ','))
                cfg.n_grid.push_back(detail::to_int(s, "n"));
            for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
                if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
                    throw std::runtime_error("config: n grid must be strictly increasing");
        }
        if (auto v = get("replicas")) cfg.replicas = detail::to_int(*v, "replicas");
        if (cfg.replicas < 1) throw std::runtime_error("config: replicas must be >= 1");
        if (auto v = get("seed"))
            cfg.seed = static_cast<std::uint64_t>(detail::to_int(*v, "seed"));
        if (auto v = get("lambda")) cfg.lambda = detail::to_double(*v, "lambda");
        if (auto v = get("workers"))
            cfg.workers = static_cast<int>(detail::to_int(*v, "workers"));
        if (auto v = get("out")) cfg.out = *v;
        if (auto v = get("ell")) cfg.ell = detail::to_int(*v, "ell");
        if (auto v = get("walks")) cfg.walks = detail::to_int(*v, "walks");
        if (auto v = get("cap"))
            cfg.cap = static_cast<std::uint64_t>(detail::to_int(*v, "cap"));
        if (auto v = get("mmax")) cfg.mmax = static_cast<int>(detail::to_int(*v, "mmax"));
        if (auto v = get("top_clusters"))
            cfg.top_clusters = detail::to_int(*v, "top_clusters");
        if (auto v = get("epsilons")) {
            cfg.epsilons.clear();
            for (const auto& s : detail::split(*v, ','))
                cfg.epsilons.push_back(detail::to_double(s, "epsilons"));
        }
    }
    if (cfg.n_grid.empty()) cfg.n_grid.push_back(1000);

    // Canonical text: sections and keys in sorted order.
    std::ostringstream canon;
    for (const auto& [name, kv] : sections) {
        canon << "[" << name << "]\n";
        for (const auto& [k, v] : kv) canon << k << "=" << v << "\n";
    }
    cfg.canonical_text = canon.str();
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline std::uint64_t config_hash(const ExperimentConfig& cfg) {
    // FNV-1a over the canonical text
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : cfg.canonical_text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace cfpp
