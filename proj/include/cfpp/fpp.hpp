#pragma once

// First passage percolation proper: per-edge weight assignment, passage time
// and hopcount via lexicographic (time, hops) label-setting, single-source
// flooding, and the stub-level smallest-weight-graph growth with its
// stopping-time and collision bookkeeping.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "cfpp/distributions.hpp"
#include "cfpp/graphgen.hpp"
#include "cfpp/rng.hpp"

namespace cfpp {

constexpr double kInfTime = std::numeric_limits<double>::infinity();

inline std::vector<double> assign_weights(const HalfEdgeGraph& g,
                                          const WeightModel& w, Rng& rng) {
    std::vector<double> weights(static_cast<std::size_t>(g.edge_count()));
    for (auto& weight : weights) weight = w.sample(rng);
    return weights;
}

struct FppResult {
    vertex_t source = 0;
    vertex_t target = 0;
    double time = kInfTime;                // +inf iff disconnected
    std::optional<std::int64_t> hops;      // absent iff disconnected
};

namespace detail {

struct Label {
    double time;
    std::int64_t hops;
    vertex_t vertex;
    bool operator>(const Label& o) const {
        if (time != o.time) return time > o.time;
        if (hops != o.hops) return hops > o.hops;
        return vertex > o.vertex;
    }
};

// Dijkstra with lexicographic (time, hops) labels. Among all time-optimal
// paths the hop label settles to the minimum, which is exactly the hopcount
// for nonnegative weights. Optimal-path comparisons are exact on doubles.
template <class Visit>
void label_setting(const HalfEdgeGraph& g, const std::vector<double>& weights,
                   vertex_t source, std::vector<double>& time,
                   std::vector<std::int64_t>& hops, Visit&& visit) {
    time.assign(static_cast<std::size_t>(g.n), kInfTime);
    hops.assign(static_cast<std::size_t>(g.n), -1);
    std::priority_queue<Label, std::vector<Label>, std::greater<>> queue;
    time[static_cast<std::size_t>(source)] = 0.0;
    hops[static_cast<std::size_t>(source)] = 0;
    queue.push(Label{0.0, 0, source});
    while (!queue.empty()) {
        const Label top = queue.top();
        queue.pop();
        const auto u = static_cast<std::size_t>(top.vertex);
        if (top.time != time[u] || top.hops != hops[u]) continue;  // stale
        if (!visit(top.vertex, top.time, top.hops)) return;
        for (stub_t h = g.stub_offset[u]; h < g.stub_offset[u + 1]; ++h) {
            const auto partner = static_cast<std::size_t>(g.pairing[static_cast<std::size_t>(h)]);
            const auto v = static_cast<std::size_t>(g.stub_vertex[partner]);
            const double w = weights[static_cast<std::size_t>(g.stub_edge[static_cast<std::size_t>(h)])];
            const double cand_time = top.time + w;
            const std::int64_t cand_hops = top.hops + 1;
            if (cand_time < time[v] ||
                (cand_time == time[v] && cand_hops < hops[v])) {
                time[v] = cand_time;
                hops[v] = cand_hops;
                queue.push(Label{cand_time, cand_hops, static_cast<vertex_t>(v)});
            }
        }
    }
}

} // namespace detail

inline FppResult passage_time(const HalfEdgeGraph& g,
                              const std::vector<double>& weights, vertex_t u,
                              vertex_t v) {
    if (u < 0 || u >= g.n || v < 0 || v >= g.n)
        throw std::invalid_argument("vertex out of range");
    FppResult res;
    res.source = u;
    res.target = v;
    std::vector<double> time;
    std::vector<std::int64_t> hops;
    detail::label_setting(g, weights, u, time, hops,
                          [&](vertex_t x, double, std::int64_t) { return x != v; });
    if (time[static_cast<std::size_t>(v)] < kInfTime) {
        res.time = time[static_cast<std::size_t>(v)];
        res.hops = hops[static_cast<std::size_t>(v)];
    }
    return res;
}

struct FloodResult {
    std::vector<double> time;      // +inf where unreachable
    std::vector<std::int64_t> hops;
    double max_time = 0.0;         // over the reachable set
    std::int64_t unreachable = 0;  // stragglers, counted and flagged
};

inline FloodResult flood(const HalfEdgeGraph& g, const std::vector<double>& weights,
                         vertex_t u) {
    if (u < 0 || u >= g.n) throw std::invalid_argument("vertex out of range");
    FloodResult res;
    detail::label_setting(g, weights, u, res.time, res.hops,
                          [](vertex_t, double, std::int64_t) { return true; });
    for (double t : res.time) {
        if (t == kInfTime)
            ++res.unreachable;
        else
            res.max_time = std::max(res.max_time, t);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Smallest-weight-graph growth
// ---------------------------------------------------------------------------

struct SwgStop {
    std::int64_t max_steps = 0;        // vertices added; 0 = unlimited
    std::int64_t max_sigma_index = 0;  // 0 = unlimited
    double max_time = 0.0;             // 0 = unlimited
};

struct SwgSigma {
    std::int64_t sigma = 0;          // |SWG| when the zero cluster completed
    std::int64_t cluster_size = 0;   // |C(v_{sigma_l + 1})|
    std::int64_t boundary_stubs = 0; // active positive stubs at this point
};

struct SwgEvent {
    std::int64_t step = 0;  // m: |SWG| after this addition
    vertex_t vertex = 0;
    double time = 0.0;      // arrival (passage) time
};

struct SwgTrace {
    std::vector<SwgEvent> events;          // events[0] is the source at time 0
    std::vector<SwgSigma> sigma;           // sigma_1, sigma_2, ...
    bool collided = false;
    std::int64_t r_col = 0;                // min{m : R_m > m}; 0 if no collision
    vertex_t collision_vertex = -1;        // SWG vertex hit by the marked stub
    std::int64_t boundary_vertices = -1;   // realized |dSWG| at the stop point
    std::vector<std::int64_t> s_eps;       // |S^eps| per configured epsilon
    std::vector<double> epsilons;
};

// Stub-level growth: every vertex reveals its stub weights (the weights of
// its incident edges) when it joins; the active stub with minimal tentative
// arrival time (owner arrival + stub weight) is paired next, ties broken by
// lowest stub index. Pairing into a marked stub is a collision and stops the
// growth. sigma_l are recorded whenever no zero-weight stub remains active.
// At the stop point the remaining positive stubs are resolved against the
// fixed pairing to measure the realized boundary and the S^eps counts.
inline SwgTrace grow_swg(const HalfEdgeGraph& g, const std::vector<double>& weights,
                         vertex_t source, const SwgStop& stop,
                         const std::vector<double>& epsilons = {}) {
    if (source < 0 || source >= g.n)
        throw std::invalid_argument("vertex out of range");

    struct ActiveStub {
        double tentative;
        stub_t stub;
        bool operator>(const ActiveStub& o) const {
            if (tentative != o.tentative) return tentative > o.tentative;
            return stub > o.stub;
        }
    };

    SwgTrace trace;
    trace.epsilons = epsilons;
    std::vector<std::uint8_t> in_swg(static_cast<std::size_t>(g.n), 0);
    std::vector<double> arrival(static_cast<std::size_t>(g.n), 0.0);
    std::priority_queue<ActiveStub, std::vector<ActiveStub>, std::greater<>> active;
    std::int64_t zero_active = 0;
    std::int64_t last_sigma = 0;

    auto stub_weight = [&](stub_t h) {
        return weights[static_cast<std::size_t>(g.stub_edge[static_cast<std::size_t>(h)])];
    };
    auto join = [&](vertex_t v, double t, stub_t via_partner) {
        in_swg[static_cast<std::size_t>(v)] = 1;
        arrival[static_cast<std::size_t>(v)] = t;
        trace.events.push_back(
            SwgEvent{static_cast<std::int64_t>(trace.events.size()) + 1, v, t});
        for (stub_t h = g.stub_offset[static_cast<std::size_t>(v)];
             h < g.stub_offset[static_cast<std::size_t>(v) + 1]; ++h) {
            if (h == via_partner) continue;  // consumed by the joining edge
            const double w = stub_weight(h);
            active.push(ActiveStub{t + w, h});
            if (w == 0.0) ++zero_active;
        }
    };
    auto count_positive_active = [&] {
        return static_cast<std::int64_t>(active.size()) - zero_active;
    };

    join(source, 0.0, -1);
    if (zero_active == 0)
        trace.sigma.push_back(SwgSigma{1, 1, count_positive_active()});

    while (!active.empty()) {
        if (stop.max_steps > 0 &&
            static_cast<std::int64_t>(trace.events.size()) >= stop.max_steps)
            break;
        if (stop.max_sigma_index > 0 &&
            static_cast<std::int64_t>(trace.sigma.size()) >= stop.max_sigma_index)
            break;
        const ActiveStub top = active.top();
        if (stop.max_time > 0.0 && top.tentative > stop.max_time) break;
        active.pop();
        if (stub_weight(top.stub) == 0.0) --zero_active;

        const stub_t partner = g.pairing[static_cast<std::size_t>(top.stub)];
        const vertex_t v = g.stub_vertex[static_cast<std::size_t>(partner)];
        if (in_swg[static_cast<std::size_t>(v)]) {
            // Marked stub: a cycle would form.
            trace.collided = true;
            trace.r_col = static_cast<std::int64_t>(trace.events.size()) + 1;
            trace.collision_vertex = v;
            break;
        }
        join(v, top.tentative, partner);
        if (zero_active == 0) {
            const auto m = static_cast<std::int64_t>(trace.events.size());
            trace.sigma.push_back(
                SwgSigma{m, m - last_sigma, count_positive_active()});
            last_sigma = m;
        }
    }

    // Realized boundary: resolve remaining active stubs against the pairing,
    // counting distinct outside vertices; stubs pairing back into the SWG are
    // would-be collisions and excluded.
    std::unordered_set<vertex_t> boundary;
    std::vector<std::unordered_set<vertex_t>> s_eps(epsilons.size());
    while (!active.empty()) {
        const ActiveStub top = active.top();
        active.pop();
        const stub_t partner = g.pairing[static_cast<std::size_t>(top.stub)];
        const vertex_t v = g.stub_vertex[static_cast<std::size_t>(partner)];
        if (in_swg[static_cast<std::size_t>(v)]) continue;
        boundary.insert(v);
        const double w = stub_weight(top.stub);
        for (std::size_t i = 0; i < epsilons.size(); ++i)
            if (w <= epsilons[i]) s_eps[i].insert(v);
    }
    trace.boundary_vertices = static_cast<std::int64_t>(boundary.size());
    trace.s_eps.resize(epsilons.size());
    for (std::size_t i = 0; i < epsilons.size(); ++i)
        trace.s_eps[i] = static_cast<std::int64_t>(s_eps[i].size());
    return trace;
}

// Forward degrees (degree - 1) of newly discovered vertices in discovery
// order, source excluded.
inline std::vector<std::int32_t> forward_degree_trace(const SwgTrace& trace,
                                                      const HalfEdgeGraph& g) {
    std::vector<std::int32_t> out;
    out.reserve(trace.events.size());
    for (std::size_t i = 1; i < trace.events.size(); ++i)
        out.push_back(
            g.degrees[static_cast<std::size_t>(trace.events[i].vertex)] - 1);
    return out;
}

// ---------------------------------------------------------------------------
// Two-source growth
// ---------------------------------------------------------------------------

struct TwoSourceResult {
    SwgTrace first;   // grown from v for `steps`
    SwgTrace second;  // grown from u until intersection/collision/steps
    bool intersected = false;
    vertex_t meeting_vertex = -1;
};

// Sequential two-source protocol: grow from v, then from u; the second
// growth additionally stops when it touches any vertex of the first trace.
// Interleaving after first intersection is out of scope; callers needing the
// exact passage time hand off to flood().
inline TwoSourceResult two_source_growth(const HalfEdgeGraph& g,
                                         const std::vector<double>& weights,
                                         vertex_t u, vertex_t v,
                                         std::int64_t steps) {
    if (u == v) throw std::invalid_argument("sources must differ");
    TwoSourceResult res;
    SwgStop stop;
    stop.max_steps = steps;
    res.first = grow_swg(g, weights, v, stop);

    std::vector<std::uint8_t> in_first(static_cast<std::size_t>(g.n), 0);
    for (const auto& ev : res.first.events)
        in_first[static_cast<std::size_t>(ev.vertex)] = 1;
    if (in_first[static_cast<std::size_t>(u)]) {
        res.intersected = true;
        res.meeting_vertex = u;
        return res;
    }

    // Second growth replicated inline so membership in the first trace can
    // terminate it.
    struct ActiveStub {
        double tentative;
        stub_t stub;
        bool operator>(const ActiveStub& o) const {
            if (tentative != o.tentative) return tentative > o.tentative;
            return stub > o.stub;
        }
    };
    std::vector<std::uint8_t> in_swg(static_cast<std::size_t>(g.n), 0);
    std::priority_queue<ActiveStub, std::vector<ActiveStub>, std::greater<>> active;
    auto stub_weight = [&](stub_t h) {
        return weights[static_cast<std::size_t>(g.stub_edge[static_cast<std::size_t>(h)])];
    };
    auto join = [&](vertex_t x, double t, stub_t via_partner) {
        in_swg[static_cast<std::size_t>(x)] = 1;
        res.second.events.push_back(
            SwgEvent{static_cast<std::int64_t>(res.second.events.size()) + 1, x, t});
        for (stub_t h = g.stub_offset[static_cast<std::size_t>(x)];
             h < g.stub_offset[static_cast<std::size_t>(x) + 1]; ++h) {
            if (h == via_partner) continue;
            active.push(ActiveStub{t + stub_weight(h), h});
        }
    };
    join(u, 0.0, -1);
    while (!active.empty() &&
           static_cast<std::int64_t>(res.second.events.size()) < steps) {
        const ActiveStub top = active.top();
        active.pop();
        const stub_t partner = g.pairing[static_cast<std::size_t>(top.stub)];
        const vertex_t x = g.stub_vertex[static_cast<std::size_t>(partner)];
        if (in_first[static_cast<std::size_t>(x)]) {
            res.intersected = true;
            res.meeting_vertex = x;
            break;
        }
        if (in_swg[static_cast<std::size_t>(x)]) {
            res.second.collided = true;
            res.second.r_col =
                static_cast<std::int64_t>(res.second.events.size()) + 1;
            break;
        }
        join(x, top.tentative, partner);
    }
    return res;
}

} // namespace cfpp
