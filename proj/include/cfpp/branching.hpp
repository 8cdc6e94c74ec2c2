#pragma once

// Age-dependent branching machinery: the explosion classifier built on the
// min-summability integral, the zero-cluster exploration walk, the exact
// Kemperman hitting-time oracle, and event-driven simulation of the modified
// branching process that approximates local neighborhoods of the graph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfpp/distributions.hpp"
#include "cfpp/rng.hpp"

namespace cfpp {

// ---------------------------------------------------------------------------
// Explosion classifier
// ---------------------------------------------------------------------------

enum class Verdict { Explosive, Conservative };

struct ExplosionVerdict {
    Verdict verdict;
    bool analytic;            // decided by closed form rather than quadrature
    double integral_estimate; // partial value of the criterion integral
    double error_bound;       // last-doubling increment (quadrature path)
    double series_check;      // partial sum of the alpha=1/2 series
    double epsilon;           // lower cutoff used by the numeric path
};

namespace detail {

// Integral of quantile(e^-u) du/u over [lo, hi], via the substitution
// u = e^s which makes the integrand quantile(exp(-e^s)) ds, smooth on a
// linear grid in s.
inline double min_sum_integral(const PositiveLaw& law, double lo, double hi,
                               int points_per_decade = 512) {
    const double s0 = std::log(lo), s1 = std::log(hi);
    const int n = std::max(8, static_cast<int>((s1 - s0) / std::log(10.0)) *
                                  points_per_decade);
    const double h = (s1 - s0) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = s0 + h * static_cast<double>(i);
        const double f = law.quantile_log(-std::exp(s));
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    return acc * h;
}

// Partial sum of sum_n quantile(exp(-1/alpha^n)) at alpha = 1/2, the
// equivalent series form of the criterion; used as a cross-check.
inline double min_sum_series(const PositiveLaw& law, int terms = 64) {
    double acc = 0.0;
    for (int n = 1; n <= terms; ++n) {
        const double log_y = -std::pow(2.0, static_cast<double>(n));
        acc += law.quantile_log(log_y);
    }
    return acc;
}

} // namespace detail

// Decides whether the positive weight part is min-summable, i.e. whether the
// associated branching process explodes. Closed forms cover the named
// families; anything else goes through quadrature with an explicit stopping
// rule (doubling upper limits, divergence if the top-scale increment stays
// above 1e-6, convergence if it falls below 1e-9).
inline ExplosionVerdict classify_min_summable(const WeightModel& w) {
    const PositiveLaw& law = w.positive_part();
    constexpr double kEps = 0.1;

    ExplosionVerdict out{};
    out.epsilon = kEps;
    out.series_check = detail::min_sum_series(law);

    auto analytic = [&](Verdict v) {
        out.verdict = v;
        out.analytic = true;
        out.integral_estimate = detail::min_sum_integral(law, 1.0 / kEps, 1e12);
        out.error_bound = 0.0;
        return out;
    };

    switch (law.family()) {
        case PositiveFamily::PowerNearZero:   // quantile(e^-u) decays exponentially
        case PositiveFamily::ExpStretch:      // quantile(e^-u) ~ u^{-1/b}
        case PositiveFamily::Exponential:     // quantile(e^-u) ~ e^-u
            return analytic(Verdict::Explosive);
        case PositiveFamily::DoubleExp:
            // quantile(e^-u) = (log(1+u))^{-1/gamma}: integrable iff gamma < 1
            return analytic(law.param() < 1.0 ? Verdict::Explosive
                                              : Verdict::Conservative);
        case PositiveFamily::PointMass:       // constant quantile, log-divergent
            return analytic(Verdict::Conservative);
        case PositiveFamily::Empirical:
            break;
    }

    // Numeric fallback.
    out.analytic = false;
    double total = detail::min_sum_integral(law, 1.0 / kEps, 1e2);
    double increment = 0.0;
    double lo = 1e2;
    for (double hi = 1e4; hi <= 1e12 + 1.0; hi *= 1e2) {
        increment = detail::min_sum_integral(law, lo, hi);
        total += increment;
        lo = hi;
        if (increment < 1e-9) {
            out.verdict = Verdict::Explosive;
            out.integral_estimate = total;
            out.error_bound = increment;
            return out;
        }
    }
    out.integral_estimate = total;
    out.error_bound = increment;
    if (increment > 1e-6) {
        out.verdict = Verdict::Conservative;
        return out;
    }
    throw std::runtime_error("min-summability classifier inconclusive");
}

// ---------------------------------------------------------------------------
// Zero-cluster exploration walk
// ---------------------------------------------------------------------------

struct WalkResult {
    std::uint64_t chi = 0;          // cluster size (steps until the walk dies)
    std::uint64_t positive_stubs = 0; // S_chi = sum of xi_i
    bool capped = false;
};

// Simulates the active-set walk Q_i = Q_{i-1} + eta_i - 1 with
// eta_i ~ Binomial(B_i, p_keep), B_i from the size-biased pmf q, until the
// active set empties or `cap` steps have been taken. Critical walks have no
// finite mean, so hitting the cap is a routine outcome, not an error.
inline WalkResult run_cluster_walk(const DiscreteSampler& q_sampler, double p_keep,
                                   std::uint64_t cap, Rng& rng) {
    if (cap < 1) throw std::invalid_argument("cap must be at least 1");
    WalkResult res;
    std::uint64_t active = 1;
    while (active > 0) {
        if (res.chi >= cap) {
            res.capped = true;
            return res;
        }
        const auto b = q_sampler(rng);
        const std::uint32_t eta = rng.binomial(b, p_keep);
        res.positive_stubs += b - eta;
        active += eta;
        active -= 1;
        ++res.chi;
    }
    return res;
}

inline WalkResult run_cluster_walk(const std::vector<double>& q, double p_keep,
                                   std::uint64_t cap, Rng& rng) {
    return run_cluster_walk(DiscreteSampler(q), p_keep, cap, rng);
}

// ---------------------------------------------------------------------------
// Kemperman oracle
// ---------------------------------------------------------------------------

// Exact law of the walk termination time: P(chi = m) = (k/m) P(W_m - m = -k)
// at k = 1, with W_m the m-fold convolution of eta ~ Binomial(B, p_keep),
// B ~ q. Requires finite support; the convolution arrays grow as m * max(B).
inline double kemperman_pmf(const std::vector<double>& q, double p_keep, int m,
                            int k = 1) {
    if (m < 1) throw std::invalid_argument("m must be at least 1");
    if (k < 1 || k > m) return 0.0;
    const std::size_t bmax = q.size() > 0 ? q.size() - 1 : 0;
    if (static_cast<double>(m) * static_cast<double>(bmax) > 5e7)
        throw std::runtime_error("kemperman convolution exceeds memory budget");

    // pmf of eta: sum_b q_b * Binomial(b, p_keep)
    std::vector<double> eta(bmax + 1, 0.0);
    for (std::size_t b = 0; b <= bmax; ++b) {
        if (q[b] == 0.0) continue;
        // binomial pmf by recurrence
        double term = std::pow(1.0 - p_keep, static_cast<double>(b));
        for (std::size_t i = 0; i <= b; ++i) {
            eta[i] += q[b] * term;
            if (i < b)
                term *= (static_cast<double>(b - i) / static_cast<double>(i + 1)) *
                        (p_keep / (1.0 - p_keep));
        }
    }

    std::vector<double> conv{1.0};
    for (int step = 0; step < m; ++step) {
        std::vector<double> next(conv.size() + bmax, 0.0);
        for (std::size_t i = 0; i < conv.size(); ++i) {
            if (conv[i] == 0.0) continue;
            for (std::size_t j = 0; j <= bmax; ++j)
                next[i + j] += conv[i] * eta[j];
        }
        conv.swap(next);
    }
    const long long target = static_cast<long long>(m) - k;  // W_m = m - k
    if (target < 0 || target >= static_cast<long long>(conv.size())) return 0.0;
    return (static_cast<double>(k) / static_cast<double>(m)) *
           conv[static_cast<std::size_t>(target)];
}

// ---------------------------------------------------------------------------
// Event-driven branching process simulation
// ---------------------------------------------------------------------------

struct BpStop {
    std::uint64_t max_events = 0;       // 0 = unlimited
    double max_time = 0.0;              // 0 = unlimited
    std::uint64_t max_theta_index = 0;  // 0 = unlimited
    int max_generation = -1;            // collapsed generations; -1 = unlimited
    std::uint64_t zero_cluster_cap = 10'000'000;
};

struct BpRun {
    std::vector<double> theta;          // theta[0] = 0, strictly increasing
    std::vector<std::uint64_t> sigma;   // cumulative dead population per theta
    std::vector<std::uint64_t> boundary;// alive population after each theta
    std::vector<std::uint64_t> z;       // collapsed generation sizes (complete only)
    bool capped = false;                // a zero-cluster hit the per-cluster cap
    std::uint64_t events = 0;           // total deaths processed
};

// Simulates the modified age-dependent branching process: the root dies
// immediately with D ~ p offspring, every later individual has B ~ q
// offspring, and lifetimes follow F (zero with the atom probability).
// Zero-lifetime cascades within one positive event are executed
// breadth-first, FIFO by creation index.
inline BpRun simulate_bp(const DegreeModel& d, const WeightModel& w, BpStop stop,
                         Rng& rng) {
    if (stop.max_events == 0 && stop.max_time == 0.0 &&
        stop.max_theta_index == 0 && stop.max_generation < 0)
        throw std::invalid_argument("at least one stop condition required");

    struct Pending {
        double time;
        std::uint64_t index;  // creation order, breaks ties FIFO
        std::uint32_t generation;  // collapsed generation of its cluster
        bool operator>(const Pending& o) const {
            if (time != o.time) return time > o.time;
            return index > o.index;
        }
    };

    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
    std::uint64_t next_index = 0;
    std::vector<std::uint64_t> born_per_gen;   // positive-birth clusters per generation
    std::vector<std::uint64_t> alive_per_gen;  // pending individuals per generation

    auto spawn = [&](double time, std::uint32_t gen) {
        queue.push(Pending{time, next_index++, gen});
        if (alive_per_gen.size() <= gen) alive_per_gen.resize(gen + 1, 0);
        ++alive_per_gen[gen];
    };

    BpRun run;
    born_per_gen.assign(1, 1);  // the root's cluster is generation 0
    spawn(0.0, 0);

    std::uint64_t dead = 0;
    bool root = true;
    while (!queue.empty()) {
        const Pending head = queue.top();

        if (stop.max_theta_index > 0 && run.theta.size() >= stop.max_theta_index)
            break;
        if (stop.max_time > 0.0 && head.time > stop.max_time) break;
        if (stop.max_events > 0 && run.events >= stop.max_events) break;
        if (stop.max_generation >= 0) {
            bool complete = true;
            for (int g = 0; g <= stop.max_generation &&
                            g < static_cast<int>(alive_per_gen.size()); ++g)
                if (alive_per_gen[static_cast<std::size_t>(g)] > 0) complete = false;
            if (complete) break;
        }

        // One theta event: the head individual plus its zero-lifetime cascade,
        // all dying at the same instant.
        const double now = head.time;
        std::uint64_t cluster_size = 0;
        std::deque<Pending> cascade;
        cascade.push_back(head);
        queue.pop();
        while (!cascade.empty()) {
            const Pending ind = cascade.front();
            cascade.pop_front();
            --alive_per_gen[ind.generation];
            ++dead;
            ++run.events;
            ++cluster_size;
            // Oversized zero-clusters are truncated, not fatal: the remaining
            // cascade members die childless and the run continues.
            if (cluster_size >= stop.zero_cluster_cap) {
                run.capped = true;
                break;
            }
            const int offspring =
                root ? d.sample_degree(rng) : d.sample_forward_degree(rng);
            root = false;
            for (int c = 0; c < offspring; ++c) {
                const double weight = w.sample(rng);
                if (weight == 0.0) {
                    cascade.push_back(Pending{now, next_index++, ind.generation});
                    if (alive_per_gen.size() <= ind.generation)
                        alive_per_gen.resize(ind.generation + 1, 0);
                    ++alive_per_gen[ind.generation];
                } else {
                    const auto gen = ind.generation + 1;
                    if (born_per_gen.size() <= gen) born_per_gen.resize(gen + 1, 0);
                    ++born_per_gen[gen];
                    spawn(now + weight, gen);
                }
            }
        }
        // Flush any cascade remainder after a cap (counted alive bookkeeping).
        for (const auto& ind : cascade) {
            --alive_per_gen[ind.generation];
            ++dead;
        }

        // Distinct death times only: atomic lifetime laws produce ties, which
        // extend the current theta entry instead of appending a duplicate.
        if (!run.theta.empty() && now == run.theta.back()) {
            run.sigma.back() = dead;
            run.boundary.back() = queue.size();
        } else {
            run.theta.push_back(now);
            run.sigma.push_back(dead);
            run.boundary.push_back(queue.size());
        }
    }

    // Report only complete collapsed generations: every cluster of generation
    // <= g has died, so Z_g is final.
    for (std::size_t g = 0; g < born_per_gen.size(); ++g) {
        bool complete = true;
        for (std::size_t h = 0; h <= g && h < alive_per_gen.size(); ++h)
            if (alive_per_gen[h] > 0) complete = false;
        if (!complete) break;
        run.z.push_back(born_per_gen[g]);
    }
    return run;
}

// Samples of theta_ell across independent runs, with tail increments
// theta_ell - theta_{ell/2} as a truncation-error proxy.
struct ExplosionTimeSamples {
    std::vector<double> theta_ell;
    std::vector<double> tail_increment;
    bool explosive_warning = false;  // set when the weight law is conservative
};

inline ExplosionTimeSamples estimate_explosion_time(const DegreeModel& d,
                                                    const WeightModel& w,
                                                    std::uint64_t ell,
                                                    std::uint64_t reps,
                                                    std::uint64_t seed) {
    if (ell < 2) throw std::invalid_argument("ell must be at least 2");
    ExplosionTimeSamples out;
    out.explosive_warning =
        classify_min_summable(w).verdict != Verdict::Explosive;
    for (std::uint64_t r = 0; r < reps; ++r) {
        Rng rng(seed, r);
        BpStop stop;
        stop.max_theta_index = ell;
        // Conservative laws with atomic lifetimes have infinite-mean alive
        // populations at fixed death-time index; cap work and memory so such
        // runs are truncated (and skipped below) rather than unbounded.
        stop.zero_cluster_cap = 100'000;
        stop.max_events = 5'000'000;
        const BpRun run = simulate_bp(d, w, stop, rng);
        if (run.theta.size() < ell) continue;  // died out before ell death times
        out.theta_ell.push_back(run.theta[ell - 1]);
        out.tail_increment.push_back(run.theta[ell - 1] - run.theta[ell / 2 - 1]);
    }
    return out;
}

// x_m = log(1 + Z_m) / 2^m; stabilization across m supports double-exponential
// growth of the collapsed generation sizes. Exploratory diagnostic only.
inline std::vector<double> davies_diagnostic(const std::vector<double>& z) {
    std::vector<double> x;
    x.reserve(z.size());
    for (std::size_t m = 0; m < z.size(); ++m) {
        if (z[m] <= 0.0 && m > 0) break;  // extinction: truncate, caller flags
        x.push_back(std::log1p(z[m]) / std::pow(2.0, static_cast<double>(m)));
    }
    return x;
}

inline std::vector<double> davies_diagnostic(const BpRun& run) {
    std::vector<double> z(run.z.begin(), run.z.end());
    return davies_diagnostic(z);
}

} // namespace cfpp
