#pragma once

// Shared test utilities: a deterministic graph builder from an explicit edge
// list and an all-simple-paths brute-force passage-time oracle.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "cfpp/graphgen.hpp"

namespace cfpp_test {

// Builds a HalfEdgeGraph with the given edge list (self-loops and parallel
// edges allowed); stubs are assigned vertex-major in edge order, mirroring
// the invariants of match_half_edges.
inline cfpp::HalfEdgeGraph make_graph(
    cfpp::vertex_t n,
    const std::vector<std::pair<cfpp::vertex_t, cfpp::vertex_t>>& edges) {
    cfpp::HalfEdgeGraph g;
    g.n = n;
    g.degrees.assign(static_cast<std::size_t>(n), 0);
    for (const auto& [u, v] : edges) {
        ++g.degrees[static_cast<std::size_t>(u)];
        ++g.degrees[static_cast<std::size_t>(v)];
    }
    g.stub_offset.resize(static_cast<std::size_t>(n) + 1);
    g.stub_offset[0] = 0;
    for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v)
        g.stub_offset[v + 1] = g.stub_offset[v] + g.degrees[v];
    const cfpp::stub_t total = g.stub_offset.back();
    g.stub_vertex.resize(static_cast<std::size_t>(total));
    for (std::size_t v = 0; v < static_cast<std::size_t>(n); ++v)
        for (cfpp::stub_t h = g.stub_offset[v]; h < g.stub_offset[v + 1]; ++h)
            g.stub_vertex[static_cast<std::size_t>(h)] =
                static_cast<cfpp::vertex_t>(v);

    std::vector<cfpp::stub_t> next(g.stub_offset.begin(),
                                   g.stub_offset.end() - 1);
    g.pairing.assign(static_cast<std::size_t>(total), -1);
    std::vector<std::pair<cfpp::stub_t, cfpp::stub_t>> pairs;
    for (const auto& [u, v] : edges) {
        const cfpp::stub_t a = next[static_cast<std::size_t>(u)]++;
        const cfpp::stub_t b = next[static_cast<std::size_t>(v)]++;
        g.pairing[static_cast<std::size_t>(a)] = b;
        g.pairing[static_cast<std::size_t>(b)] = a;
        pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(pairs.begin(), pairs.end());
    g.stub_edge.resize(static_cast<std::size_t>(total));
    g.edge_stub.resize(pairs.size());
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        g.edge_stub[e] = pairs[e].first;
        g.stub_edge[static_cast<std::size_t>(pairs[e].first)] =
            static_cast<cfpp::edge_t>(e);
        g.stub_edge[static_cast<std::size_t>(pairs[e].second)] =
            static_cast<cfpp::edge_t>(e);
    }
    return g;
}

struct BruteResult {
    double time = std::numeric_limits<double>::infinity();
    std::int64_t hops = -1;
};

// Exhaustive minimum over all simple paths (lexicographic in (time, hops)).
inline void brute_dfs(const cfpp::HalfEdgeGraph& g,
                      const std::vector<double>& weights, cfpp::vertex_t at,
                      cfpp::vertex_t target, double time, std::int64_t hops,
                      std::vector<char>& visited, BruteResult& best) {
    if (at == target) {
        if (time < best.time || (time == best.time && hops < best.hops)) {
            best.time = time;
            best.hops = hops;
        }
        return;
    }
    visited[static_cast<std::size_t>(at)] = 1;
    for (cfpp::stub_t h = g.stub_offset[static_cast<std::size_t>(at)];
         h < g.stub_offset[static_cast<std::size_t>(at) + 1]; ++h) {
        const auto partner =
            static_cast<std::size_t>(g.pairing[static_cast<std::size_t>(h)]);
        const cfpp::vertex_t nxt = g.stub_vertex[partner];
        if (visited[static_cast<std::size_t>(nxt)]) continue;
        const double w =
            weights[static_cast<std::size_t>(g.stub_edge[static_cast<std::size_t>(h)])];
        brute_dfs(g, weights, nxt, target, time + w, hops + 1, visited, best);
    }
    visited[static_cast<std::size_t>(at)] = 0;
}

inline BruteResult brute_force_passage(const cfpp::HalfEdgeGraph& g,
                                       const std::vector<double>& weights,
                                       cfpp::vertex_t u, cfpp::vertex_t v) {
    BruteResult best;
    std::vector<char> visited(static_cast<std::size_t>(g.n), 0);
    brute_dfs(g, weights, u, v, 0.0, 0, visited, best);
    return best;
}

} // namespace cfpp_test
