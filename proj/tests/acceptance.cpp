// Acceptance gate: ten statistical/exact criteria for the simulation stack,
// each printed as a single PASS/FAIL line with its measured values. All
// tolerances are pinned here; seeds are fixed so the suite is deterministic.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cfpp/branching.hpp"
#include "cfpp/config.hpp"
#include "cfpp/distributions.hpp"
#include "cfpp/fpp.hpp"
#include "cfpp/graphgen.hpp"
#include "cfpp/harness.hpp"
#include "cfpp/percolation.hpp"
#include "cfpp/stats.hpp"
#include "helpers.hpp"

using namespace cfpp;

namespace {

constexpr std::uint64_t kSeed = 20260824ULL;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

bool report(int idx, bool ok, const std::string& detail, double secs) {
    std::printf("[AC-%02d] %s — %s (%.1fs)\n", idx, ok ? "PASS" : "FAIL",
                detail.c_str(), secs);
    std::fflush(stdout);
    return ok;
}

std::string num(double v, const char* fmt = "%.4g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

double median_of(std::vector<double> v) {
    return summarize(std::move(v)).median;
}

// Grouped-data median for integer-valued samples. The plain sample median of
// a lattice distribution saturates at a lattice point, so strict monotonicity
// across sizes is undecidable from it; the within-bin interpolation
// med = k - 1/2 + (1/2 - P(X < k)) / P(X = k) resolves the tie.
double interpolated_median(const std::vector<double>& samples) {
    std::map<long long, double> hist;
    for (double v : samples) hist[std::llround(v)] += 1.0;
    const double total = static_cast<double>(samples.size());
    double below = 0.0;
    for (const auto& [k, c] : hist) {
        if (below + c >= total / 2.0)
            return static_cast<double>(k) - 0.5 + (0.5 - below / total) / (c / total);
        below += c;
    }
    return 0.0;
}

// Standard large-sample standard error of a sample median, with the density
// at the median estimated from the interquartile range.
double median_stderr(std::vector<double> v) {
    const Summary s = summarize(std::move(v));
    const double sigma = (s.q75 - s.q25) / 1.349;
    return 1.253 * sigma / std::sqrt(static_cast<double>(s.count));
}

// Shared sampling loop: typical passage times over a grid.
std::vector<std::vector<double>> sample_typical_times(
    const DegreeModel& d, const WeightModel& w,
    const std::vector<vertex_t>& grid, std::int64_t replicas,
    std::uint64_t seed) {
    std::vector<std::vector<double>> per_n(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const vertex_t n = grid[i];
        for (std::int64_t rep = 0; rep < replicas; ++rep) {
            Rng rng(seed, (static_cast<std::uint64_t>(i) << 32) |
                              static_cast<std::uint64_t>(rep));
            const HalfEdgeGraph g = generate_graph(d, n, rng);
            const auto weights = assign_weights(g, w, rng);
            const auto u =
                static_cast<vertex_t>(rng.below(static_cast<std::uint64_t>(n)));
            auto v = static_cast<vertex_t>(
                rng.below(static_cast<std::uint64_t>(n) - 1));
            if (v >= u) ++v;
            const FppResult res = passage_time(g, weights, u, v);
            if (res.time != kInfTime) per_n[i].push_back(res.time);
        }
    }
    return per_n;
}

} // namespace

TEST_CASE("AC-01 exact hitting-time oracle vs Monte Carlo") {
    Timer timer;
    bool ok = true;
    std::string detail;

    // closed-form spot values for the 3-regular walk
    const std::vector<double> q3{0.0, 0.0, 1.0};
    ok &= std::abs(kemperman_pmf(q3, 0.5, 1) - 0.25) < 1e-12;
    ok &= std::abs(kemperman_pmf(q3, 0.5, 2) - 0.125) < 1e-12;
    ok &= std::abs(kemperman_pmf(q3, 0.5, 3) - 5.0 / 64.0) < 1e-12;
    detail += "spot values exact=" + std::string(ok ? "yes" : "no");

    struct Model {
        std::vector<double> q;
        double p;
        const char* name;
    };
    const std::vector<Model> models{
        {{0.0, 0.0, 1.0}, 0.5, "3-regular"},
        {{0.0, 1.0 / 3.0, 0.0, 2.0 / 3.0}, 3.0 / 7.0, "p2=p4"}};
    const std::int64_t walks = 1'000'000;
    const int mmax = 20;
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        const auto& model = models[mi];
        const DiscreteSampler sampler(model.q);
        std::vector<std::int64_t> counts(mmax + 1, 0);
        Rng rng(kSeed, mi);
        for (std::int64_t i = 0; i < walks; ++i) {
            const auto res = run_cluster_walk(sampler, model.p,
                                              static_cast<std::uint64_t>(mmax) + 1,
                                              rng);
            if (!res.capped && res.chi <= static_cast<std::uint64_t>(mmax))
                ++counts[res.chi];
        }
        double worst = 0.0;
        for (int m = 1; m <= mmax; ++m) {
            const double exact = kemperman_pmf(model.q, model.p, m);
            const double mc = static_cast<double>(counts[m]) /
                              static_cast<double>(walks);
            const double se =
                std::sqrt(exact * (1.0 - exact) / static_cast<double>(walks));
            if (se > 0.0) worst = std::max(worst, std::abs(mc - exact) / se);
        }
        ok &= worst < 4.0;
        detail += std::string(", ") + model.name + " max|z|=" + num(worst);
    }
    CHECK(report(1, ok, detail, timer.seconds()));
}

TEST_CASE("AC-02 passage time equals exhaustive path enumeration") {
    Timer timer;
    const DegreeModel d({{2, 0.5}, {3, 0.5}});
    const WeightModel w(0.3, PositiveLaw::exponential(1.0));
    std::int64_t mismatches = 0;
    const std::int64_t graphs = 1000;
    for (std::int64_t i = 0; i < graphs; ++i) {
        Rng rng(kSeed, 100 + static_cast<std::uint64_t>(i));
        const auto n = static_cast<vertex_t>(4 + rng.below(6));  // 4..9
        const HalfEdgeGraph g = generate_graph(d, n, rng);
        const auto weights = assign_weights(g, w, rng);
        const auto u =
            static_cast<vertex_t>(rng.below(static_cast<std::uint64_t>(n)));
        auto v = static_cast<vertex_t>(rng.below(static_cast<std::uint64_t>(n) - 1));
        if (v >= u) ++v;
        const auto fast = passage_time(g, weights, u, v);
        const auto slow = cfpp_test::brute_force_passage(g, weights, u, v);
        const bool same_t = fast.time == slow.time;
        const bool same_h = slow.time == kInfTime
                                ? !fast.hops.has_value()
                                : (fast.hops && *fast.hops == slow.hops);
        if (!same_t || !same_h) ++mismatches;
    }
    const bool ok = mismatches == 0;
    CHECK(report(2, ok,
                 "1000 graphs (n<=9), mismatches=" +
                     std::to_string(mismatches),
                 timer.seconds()));
}

TEST_CASE("AC-03 survival tail exponents") {
    Timer timer;
    const DegreeModel d({{3, 1.0}});
    const DiscreteSampler q_sampler(d.size_biased());

    const std::int64_t walks = 1'000'000;
    const std::uint64_t cap = 20'000;
    std::vector<std::uint64_t> chi, schi;
    chi.reserve(walks);
    schi.reserve(walks);
    Rng rng(kSeed, 300);
    for (std::int64_t i = 0; i < walks; ++i) {
        const auto res = run_cluster_walk(q_sampler, d.p_c(), cap, rng);
        chi.push_back(res.chi);
        schi.push_back(res.positive_stubs);
    }
    const auto thresholds = log_spaced(16, 2500, 20);
    const auto chi_fit =
        fit_tail_slope(survival_points(chi, thresholds), 1000, kSeed);
    const auto schi_fit =
        fit_tail_slope(survival_points(schi, thresholds), 1000, kSeed + 1);

    // graph side: uniform-vertex cluster size at criticality, n = 10^6
    const vertex_t n = 1'000'000;
    const auto gthresholds = log_spaced(16, 2000, 18);
    std::vector<SurvivalPoint> gpts;
    const int greps = 2;
    std::vector<std::vector<double>> surv(greps);
    for (int r = 0; r < greps; ++r) {
        Rng grng(kSeed, 400 + static_cast<std::uint64_t>(r));
        const HalfEdgeGraph g = generate_graph(d, n, grng);
        const auto mask = percolate(g, d.p_c(), grng);
        const ClusterCensus census = cluster_census(g, mask);
        for (auto m : gthresholds) {
            double mass = 0.0;
            for (const auto& c : census.clusters) {
                if (static_cast<std::uint64_t>(c.size) < m) break;
                mass += static_cast<double>(c.size);
            }
            surv[static_cast<std::size_t>(r)].push_back(
                mass / static_cast<double>(n));
        }
    }
    for (std::size_t k = 0; k < gthresholds.size(); ++k)
        gpts.push_back(SurvivalPoint{static_cast<double>(gthresholds[k]),
                                     (surv[0][k] + surv[1][k]) / 2.0});
    const auto gfit = fit_tail_slope(gpts, 1000, kSeed + 2);

    const bool ok = std::abs(chi_fit.slope + 0.5) <= 0.05 &&
                    std::abs(schi_fit.slope + 0.5) <= 0.05 &&
                    std::abs(gfit.slope + 0.5) <= 0.07;
    CHECK(report(3, ok,
                 "chi slope=" + num(chi_fit.slope) +
                     ", S_chi slope=" + num(schi_fit.slope) +
                     ", cluster slope=" + num(gfit.slope) +
                     " (targets -0.5 +/- 0.05/0.05/0.07)",
                 timer.seconds()));
}

TEST_CASE("AC-04 bounded vs divergent passage times") {
    Timer timer;
    const DegreeModel d({{3, 1.0}});
    const std::vector<vertex_t> grid{1000, 10000, 100000};
    const std::int64_t reps = 500;

    // (i) explosive family: bounded increments + distributional limit
    const WeightModel explosive(d.p_c(),
                                PositiveLaw::power_near_zero(1.0, d.p_c()));
    const auto t_exp = sample_typical_times(d, explosive, grid, reps, kSeed + 10);
    std::vector<double> medians;
    for (const auto& v : t_exp) medians.push_back(median_of(v));
    bool ok_incr = true;
    for (std::size_t i = 1; i < medians.size(); ++i)
        ok_incr &= (medians[i] - medians[i - 1]) < 0.05;

    // theta^{(1)} + theta^{(2)} sums truncated at ell = 1000
    const std::uint64_t ell = 1000;
    std::vector<double> theta;
    for (std::uint64_t r = 0; r < 1000; ++r) {
        Rng rng(kSeed + 11, r);
        BpStop stop;
        stop.max_theta_index = ell;
        stop.zero_cluster_cap = 20'000;
        const BpRun run = simulate_bp(d, explosive, stop, rng);
        theta.push_back(run.theta.size() >= ell ? run.theta[ell - 1] : 0.0);
    }
    std::vector<double> sums;
    for (std::size_t i = 0; i < 500; ++i)
        sums.push_back(theta[i] + theta[i + 500]);
    const double ks = compare_to_explosion_limit(t_exp.back(), sums);
    const bool ok_ks = ks < 0.15;

    // (ii) conservative double-exponential: strictly increasing medians
    const WeightModel slow1(d.p_c(), PositiveLaw::double_exp(1.5));
    const auto t_dexp = sample_typical_times(d, slow1, grid, reps, kSeed + 12);
    const double m0 = median_of(t_dexp[0]), m1 = median_of(t_dexp[1]),
                 m2 = median_of(t_dexp[2]);
    const bool ok_dexp = m0 < m1 && m1 < m2;

    // (iii) point mass at one: strictly increasing medians. T is
    // integer-valued here, so the grouped-data interpolated median is used to
    // make strict comparison decidable.
    const WeightModel slow2(d.p_c(), PositiveLaw::point_mass(1.0));
    const auto t_pm = sample_typical_times(d, slow2, grid, reps, kSeed + 13);
    const double p0 = interpolated_median(t_pm[0]),
                 p1 = interpolated_median(t_pm[1]),
                 p2 = interpolated_median(t_pm[2]);
    const bool ok_pm = p0 < p1 && p1 < p2;

    const bool ok = ok_incr && ok_ks && ok_dexp && ok_pm;
    CHECK(report(
        4, ok,
        "bounded increments=" + num(medians[1] - medians[0]) + "/" +
            num(medians[2] - medians[1]) + " (<0.05), KS=" + num(ks) +
            " (<0.15), double-exp medians " + num(m0) + "<" + num(m1) + "<" +
            num(m2) + "=" + (ok_dexp ? "yes" : "no") + ", point-mass medians " +
            num(p0) + "<" + num(p1) + "<" + num(p2) + "=" +
            (ok_pm ? "yes" : "no"),
        timer.seconds()));
}

TEST_CASE("AC-05 classifier truth table") {
    Timer timer;
    bool ok = true;
    auto verdict = [&](const PositiveLaw& law) {
        return classify_min_summable(WeightModel(0.5, law)).verdict;
    };
    for (double a : {0.1, 1.0, 10.0})
        ok &= verdict(PositiveLaw::power_near_zero(a, 0.5)) == Verdict::Explosive;
    for (double b : {0.5, 1.0, 2.0})
        ok &= verdict(PositiveLaw::exp_stretch(b, 0.5)) == Verdict::Explosive;
    ok &= verdict(PositiveLaw::double_exp(0.5)) == Verdict::Explosive;
    ok &= verdict(PositiveLaw::double_exp(1.0)) == Verdict::Conservative;
    ok &= verdict(PositiveLaw::double_exp(1.5)) == Verdict::Conservative;
    ok &= verdict(PositiveLaw::point_mass(1.0)) == Verdict::Conservative;
    CHECK(report(5, ok,
                 "power/stretch explosive, double-exp split at gamma=1, "
                 "point mass conservative",
                 timer.seconds()));
}

TEST_CASE("AC-06 largest-cluster scaling stability") {
    Timer timer;
    const DegreeModel d({{3, 1.0}});
    const int reps = 50;
    auto run_scale = [&](vertex_t n, std::uint64_t stream_base) {
        std::vector<double> c1, ps;
        const double scale = std::pow(static_cast<double>(n), 2.0 / 3.0);
        for (int r = 0; r < reps; ++r) {
            Rng rng(kSeed, stream_base + static_cast<std::uint64_t>(r));
            const HalfEdgeGraph g = generate_graph(d, n, rng);
            const auto mask = percolate(g, d.p_c(), rng);
            const ClusterCensus census = cluster_census(g, mask);
            c1.push_back(static_cast<double>(census.clusters[0].size) / scale);
            ps.push_back(static_cast<double>(census.clusters[0].pos_stubs) / scale);
        }
        return std::make_pair(median_of(c1), median_of(ps));
    };
    const auto [c1_5, ps_5] = run_scale(100'000, 600);
    const auto [c1_6, ps_6] = run_scale(1'000'000, 700);
    const double r_c1 = c1_6 / c1_5;
    const double r_ps = ps_6 / ps_5;
    const bool ok = r_c1 > 0.5 && r_c1 < 2.0 && r_ps > 0.5 && r_ps < 2.0;
    CHECK(report(6, ok,
                 "median |C1|/n^{2/3}: " + num(c1_5) + " -> " + num(c1_6) +
                     " (ratio " + num(r_c1) + "), P+/n^{2/3}: " + num(ps_5) +
                     " -> " + num(ps_6) + " (ratio " + num(r_ps) +
                     "), both in (0.5, 2)",
                 timer.seconds()));
}

TEST_CASE("AC-07 flooding time floor") {
    Timer timer;
    const DegreeModel d({{2, 0.5}, {4, 0.5}});
    const WeightModel w(d.p_c(), PositiveLaw::exponential(1.0));
    const int reps = 20;
    auto run_floods = [&](vertex_t n, std::uint64_t stream_base) {
        std::vector<double> ratios;
        for (int r = 0; r < reps; ++r) {
            Rng rng(kSeed, stream_base + static_cast<std::uint64_t>(r));
            const HalfEdgeGraph g = generate_graph(d, n, rng);
            const auto weights = assign_weights(g, w, rng);
            const auto src =
                static_cast<vertex_t>(rng.below(static_cast<std::uint64_t>(n)));
            const FloodResult res = flood(g, weights, src);
            ratios.push_back(res.max_time / std::log(static_cast<double>(n)));
        }
        return ratios;
    };
    const auto r4 = run_floods(10'000, 800);
    const auto r5 = run_floods(100'000, 900);
    int above4 = 0, above5 = 0;
    for (double r : r4) above4 += (r > 0.02);
    for (double r : r5) above5 += (r > 0.02);
    const double med4 = median_of(r4), med5 = median_of(r5);
    // "Does not decrease" is tested up to sampling noise: with 20 replicas
    // the median standard error (~0.02) dwarfs the true increment between
    // these sizes (the ratio has already stabilized near its limit), so a
    // genuine decrease must exceed two standard errors of the difference.
    const double se_diff = std::sqrt(median_stderr(r4) * median_stderr(r4) +
                                     median_stderr(r5) * median_stderr(r5));
    const bool ok = above4 >= 19 && above5 >= 19 && med5 >= med4 - 2.0 * se_diff;
    CHECK(report(7, ok,
                 "ratio>0.02 in " + std::to_string(above4) + "/20 and " +
                     std::to_string(above5) + "/20 (need >=19), medians " +
                     num(med4) + " -> " + num(med5) + " (tolerance -" +
                     num(2.0 * se_diff) + ")",
                 timer.seconds()));
}

TEST_CASE("AC-08 isolated path length floor") {
    Timer timer;
    const DegreeModel d({{2, 0.5}, {4, 0.5}});
    const vertex_t n = 1'000'000;
    const int reps = 50;
    const double floor =
        (1.0 / (2.0 * std::log(3.0)) - 0.15) * std::log(static_cast<double>(n));
    int above = 0;
    std::vector<double> lengths;
    for (int r = 0; r < reps; ++r) {
        Rng rng(kSeed, 1000 + static_cast<std::uint64_t>(r));
        const HalfEdgeGraph g = generate_graph(d, n, rng);
        const auto longest = static_cast<double>(isolated_path_census(g));
        lengths.push_back(longest);
        above += (longest >= floor);
    }
    const bool ok = above >= 48;  // 95% of 50, rounded up
    CHECK(report(8, ok,
                 "floor=" + num(floor) + ", above in " + std::to_string(above) +
                     "/50 (need >=48), median run=" + num(median_of(lengths)),
                 timer.seconds()));
}

TEST_CASE("AC-09 growth-coupling diagnostics") {
    Timer timer;
    const DegreeModel d({{3, 1.0}});
    const WeightModel w(d.p_c(), PositiveLaw::exponential(1.0));
    const vertex_t n = 1'000'000;
    const double nd = static_cast<double>(n);
    const int reps = 100;
    constexpr double kRho = 0.375;
    constexpr double kEta = 0.1;
    const double col_threshold = std::pow(nd, 0.4);
    const auto tv_window = static_cast<std::size_t>(std::ceil(std::pow(nd, 0.3)));
    const auto ell = static_cast<std::size_t>(
        std::floor(std::pow(nd, kRho / 2.0 - kEta / 4.0)));
    const double corridor_low = 0.1 * std::pow(nd, kRho - kEta);
    const double corridor_high = 10.0 * std::pow(nd, kRho);

    std::map<std::int64_t, double> q_ref;
    for (std::size_t k = 0; k < d.size_biased().size(); ++k)
        if (d.size_biased()[k] > 0.0)
            q_ref[static_cast<std::int64_t>(k)] = d.size_biased()[k];

    int early = 0, inside = 0;
    double max_tv = 0.0;
    for (int r = 0; r < reps; ++r) {
        Rng rng(kSeed, 1200 + static_cast<std::uint64_t>(r));
        const HalfEdgeGraph g = generate_graph(d, n, rng);
        const auto weights = assign_weights(g, w, rng);
        const auto src =
            static_cast<vertex_t>(rng.below(static_cast<std::uint64_t>(n)));
        const SwgTrace trace = grow_swg(g, weights, src, SwgStop{});
        if (trace.collided &&
            static_cast<double>(trace.r_col) <= col_threshold)
            ++early;
        const auto fwd = forward_degree_trace(trace, g);
        std::map<std::int64_t, double> emp;
        const std::size_t window = std::min(tv_window, fwd.size());
        for (std::size_t i = 0; i < window; ++i)
            emp[fwd[i]] += 1.0 / static_cast<double>(window);
        max_tv = std::max(max_tv, window > 0 ? tv_distance(emp, q_ref) : 1.0);
        if (trace.sigma.size() >= ell) {
            const auto boundary =
                static_cast<double>(trace.sigma[ell - 1].boundary_stubs);
            inside += (boundary >= corridor_low && boundary <= corridor_high);
        }
    }
    const double early_frac = static_cast<double>(early) / reps;
    const bool ok = early_frac <= 0.05 && max_tv < 0.02 && inside >= 90;
    CHECK(report(9, ok,
                 "P(R_col<=" + num(col_threshold) + ")=" + num(early_frac) +
                     " (<=0.05), max TV=" + num(max_tv) +
                     " (<0.02), boundary at sigma_" + std::to_string(ell) +
                     " in [" + num(corridor_low) + ", " + num(corridor_high) +
                     "] for " + std::to_string(inside) + "/100 (need >=90)",
                 timer.seconds()));
}

TEST_CASE("AC-10 bit-identical raw output across worker counts") {
    Timer timer;
    const std::string base =
        "[degree]\npmf = 3:1.0\n"
        "[weight]\nfamily = power_near_zero\na = 1.0\natom = critical\n";
    const std::string configs[] = {
        "[experiment]\nkind = typical_time\nn = 500,1000\nreplicas = 32\nseed = 77\n" + base,
        "[experiment]\nkind = flood\nn = 400\nreplicas = 16\nseed = 78\n" + base,
        "[experiment]\nkind = scaling_window\nn = 2000\nreplicas = 8\nseed = 79\n" + base,
    };
    bool ok = true;
    for (const auto& text : configs) {
        std::string first;
        for (int workers : {1, 4, 16}) {
            auto cfg = parse_config_text(text);
            cfg.workers = workers;
            const auto res = run_experiment(cfg);
            if (first.empty())
                first = res.csv;
            else
                ok &= (res.csv == first);
        }
    }
    CHECK(report(10, ok,
                 "typical_time/flood/scaling_window CSV identical under 1, 4, "
                 "16 workers",
                 timer.seconds()));
}
