// Command-line front end: model classification, branching-process sampling,
// graph generation/dumping, percolation census, passage-time and flooding
// runs, and the full experiment harness. Every subcommand reads a config
// file and accepts a small set of overrides.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cfpp/branching.hpp"
#include "cfpp/config.hpp"
#include "cfpp/fpp.hpp"
#include "cfpp/graphgen.hpp"
#include "cfpp/harness.hpp"
#include "cfpp/percolation.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::vector<std::int64_t> n;
    std::optional<std::int64_t> replicas;
    std::optional<std::int64_t> seed;
    std::optional<int> workers;
    std::string out;
    bool check = false;
};

void add_common(CLI::App* cmd, Overrides& ov, bool with_check = false) {
    cmd->add_option("--config", ov.config_path, "run-configuration file")
        ->required();
    cmd->add_option("--n", ov.n, "override the n grid")->delimiter(',');
    cmd->add_option("--replicas", ov.replicas, "override the replica count");
    cmd->add_option("--seed", ov.seed, "override the base seed");
    cmd->add_option("--workers", ov.workers, "override the worker count");
    cmd->add_option("--out", ov.out, "output path prefix");
    if (with_check)
        cmd->add_flag("--check", ov.check,
                      "evaluate the built-in per-kind check; exit 2 on failure");
}

cfpp::ExperimentConfig load(const Overrides& ov) {
    cfpp::ExperimentConfig cfg = cfpp::parse_config_file(ov.config_path);
    if (!ov.n.empty()) cfg.n_grid = ov.n;
    if (ov.replicas) cfg.replicas = *ov.replicas;
    if (ov.seed) cfg.seed = static_cast<std::uint64_t>(*ov.seed);
    if (ov.workers) cfg.workers = *ov.workers;
    if (!ov.out.empty()) cfg.out = ov.out;
    return cfg;
}

void emit(const cfpp::ExperimentResult& res, const cfpp::ExperimentConfig& cfg) {
    if (!cfg.out.empty()) {
        cfpp::write_result(res, cfg.out);
        std::cerr << "wrote " << cfg.out << ".csv and " << cfg.out << ".json\n";
    } else {
        std::cout << res.csv;
    }
    std::cout << res.summary.dump(2) << "\n";
}

// Built-in plausibility checks behind `experiment --check`. Thresholds match
// the ones pinned in the acceptance suite.
bool evaluate_check(const cfpp::ExperimentConfig& cfg,
                    const cfpp::ExperimentResult& res, std::string& why) {
    const auto& s = res.summary;
    if (cfg.kind == "kemperman_check") {
        if (s["max_abs_z"].get<double>() > 4.0) {
            why = "max |z| above 4";
            return false;
        }
        return true;
    }
    if (cfg.kind == "cluster_tails") {
        const double slope = s["walk"]["chi_slope"]["slope"].get<double>();
        if (std::abs(slope + 0.5) > 0.05) {
            why = "chi tail slope outside -0.5 +/- 0.05";
            return false;
        }
        return true;
    }
    if (cfg.kind == "typical_time") {
        const bool explosive =
            cfpp::classify_min_summable(*cfg.weight).verdict ==
            cfpp::Verdict::Explosive;
        const auto& incr = s["median_T_increments"];
        for (const auto& v : incr) {
            const double dv = v.get<double>();
            if (explosive && !(dv < 0.05)) {
                why = "median increment not below 0.05";
                return false;
            }
            if (!explosive && !(dv > 0.0)) {
                why = "median not strictly increasing";
                return false;
            }
        }
        return true;
    }
    if (cfg.kind == "flood") {
        for (const auto& j : s["per_n"])
            if (j["min_ratio"].get<double>() < 0.02) {
                why = "flood ratio below 0.02";
                return false;
            }
        return true;
    }
    if (cfg.kind == "isolated_path") {
        const double floor = 1.0 / (2.0 * std::log(3.0)) - 0.15;
        for (const auto& j : s["per_n"])
            if (j["ratio"]["median"].get<double>() < floor) {
                why = "median degree-2 run below the floor";
                return false;
            }
        return true;
    }
    if (cfg.kind == "coupling_tv") {
        for (const auto& j : s["per_n"]) {
            if (j["early_collision_frac"].get<double>() > 0.05) {
                why = "too many early collisions";
                return false;
            }
            if (j["tv"]["median"].get<double>() >= 0.02) {
                why = "forward-degree TV too large";
                return false;
            }
        }
        return true;
    }
    // explosion, scaling_window and the conjecture probes have no built-in
    // pass/fail; --check is a no-op success for them.
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"critical first-passage percolation toolkit"};
    app.require_subcommand(1);

    Overrides ov;
    auto* c_classify = app.add_subcommand("classify", "explosion classifier verdict");
    auto* c_bp = app.add_subcommand("bp", "branching-process death-time samples");
    auto* c_gen = app.add_subcommand("gen", "generate and dump a weighted graph");
    auto* c_perc = app.add_subcommand("percolate", "percolation cluster census");
    auto* c_fpp = app.add_subcommand("fpp", "typical passage time and hopcount");
    auto* c_flood = app.add_subcommand("flood", "single-source flooding time");
    auto* c_exp = app.add_subcommand("experiment", "run the configured experiment");
    for (auto* cmd : {c_classify, c_bp, c_gen, c_perc, c_fpp, c_flood})
        add_common(cmd, ov);
    add_common(c_exp, ov, true);

    CLI11_PARSE(app, argc, argv);

    try {
        cfpp::ExperimentConfig cfg = load(ov);

        if (c_classify->parsed()) {
            if (!cfg.weight) throw std::runtime_error("classify needs a [weight] section");
            const cfpp::ExplosionVerdict v = cfpp::classify_min_summable(*cfg.weight);
            nlohmann::json j;
            j["family"] = cfg.weight->positive_part().family_name();
            j["atom_at_zero"] = cfg.weight->atom_at_zero();
            j["verdict"] =
                v.verdict == cfpp::Verdict::Explosive ? "explosive" : "conservative";
            j["analytic"] = v.analytic;
            j["integral_estimate"] = v.integral_estimate;
            j["error_bound"] = v.error_bound;
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (c_bp->parsed()) {
            const auto& d = cfpp::detail::require_degree(cfg);
            const auto& w = cfpp::detail::require_weight(cfg);
            const cfpp::ExplosionTimeSamples samples = cfpp::estimate_explosion_time(
                d, w, static_cast<std::uint64_t>(cfg.ell),
                static_cast<std::uint64_t>(cfg.replicas), cfg.seed);
            std::string csv = "theta_ell\n";
            for (double t : samples.theta_ell) csv += cfpp::detail::fmt(t) + "\n";
            if (!cfg.out.empty()) {
                std::ofstream f(cfg.out + ".csv", std::ios::binary);
                f << csv;
            } else {
                std::cout << csv;
            }
            nlohmann::json j;
            j["ell"] = cfg.ell;
            j["samples"] = samples.theta_ell.size();
            j["divergence_warning"] = samples.explosive_warning;
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (c_gen->parsed()) {
            const auto& d = cfpp::detail::require_degree(cfg);
            const auto& w = cfpp::detail::require_weight(cfg);
            const auto n = cfg.n_grid.front();
            cfpp::Rng rng(cfg.seed, 0);
            const cfpp::HalfEdgeGraph g = cfpp::generate_graph(d, n, rng);
            const auto weights = cfpp::assign_weights(g, w, rng);
            std::string dump = cfpp::detail::fmt(n) + " " +
                               cfpp::detail::fmt(g.edge_count()) + " " +
                               cfpp::detail::fmt(cfg.seed) + "\n";
            for (cfpp::edge_t e = 0; e < g.edge_count(); ++e)
                dump += cfpp::detail::fmt(g.edge_u(e)) + " " +
                        cfpp::detail::fmt(g.edge_v(e)) + " " +
                        cfpp::detail::fmt(weights[static_cast<std::size_t>(e)]) + "\n";
            if (!cfg.out.empty()) {
                std::ofstream f(cfg.out, std::ios::binary);
                f << dump;
                std::cerr << "wrote " << cfg.out << "\n";
            } else {
                std::cout << dump;
            }
            return 0;
        }

        if (c_perc->parsed()) cfg.kind = "scaling_window";
        if (c_fpp->parsed()) cfg.kind = "typical_time";
        if (c_flood->parsed()) cfg.kind = "flood";

        const cfpp::ExperimentResult res = cfpp::run_experiment(cfg);
        emit(res, cfg);

        if (c_exp->parsed() && ov.check) {
            std::string why;
            if (!evaluate_check(cfg, res, why)) {
                std::cerr << "check failed: " << why << "\n";
                return 2;
            }
            std::cerr << "check passed\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
