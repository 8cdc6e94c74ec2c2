#pragma once

// Configuration-model generation: i.i.d. degrees with a parity fix and a
// uniformly random perfect matching on half-edges. Half-edges are indexed
// vertex-major in contiguous ranges so stub -> vertex lookup is O(1), which
// the stub-level smallest-weight-graph growth relies on.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cfpp/distributions.hpp"
#include "cfpp/rng.hpp"

namespace cfpp {

using vertex_t = std::int64_t;
using stub_t = std::int64_t;
using edge_t = std::int64_t;

// Multigraph stored as a half-edge pairing; self-loops and multi-edges are
// kept. Edges are derived from the pairing: one edge per stub pair, indexed
// in increasing order of the smaller stub.
struct HalfEdgeGraph {
    vertex_t n = 0;
    std::vector<std::int32_t> degrees;
    std::vector<stub_t> stub_offset;   // size n+1; stubs of v are [off[v], off[v+1])
    std::vector<stub_t> pairing;       // fixed-point free involution on stubs
    std::vector<vertex_t> stub_vertex; // stub -> owning vertex
    std::vector<edge_t> stub_edge;     // stub -> edge id
    std::vector<stub_t> edge_stub;     // edge -> smaller stub of the pair

    stub_t stub_count() const { return static_cast<stub_t>(pairing.size()); }
    edge_t edge_count() const { return static_cast<edge_t>(edge_stub.size()); }

    vertex_t edge_u(edge_t e) const { return stub_vertex[edge_stub[e]]; }
    vertex_t edge_v(edge_t e) const { return stub_vertex[pairing[edge_stub[e]]]; }
    bool is_self_loop(edge_t e) const { return edge_u(e) == edge_v(e); }
};

// i.i.d. draws from the degree pmf; if the sum is odd the last vertex's
// degree is incremented by one.
inline std::vector<std::int32_t> sample_degrees(const DegreeModel& d, vertex_t n,
                                                Rng& rng) {
    if (n < 2) throw std::invalid_argument("need at least 2 vertices");
    std::vector<std::int32_t> degrees(static_cast<std::size_t>(n));
    std::int64_t sum = 0;
    for (auto& deg : degrees) {
        deg = static_cast<std::int32_t>(d.sample_degree(rng));
        sum += deg;
    }
    if (sum % 2 != 0) degrees.back() += 1;
    return degrees;
}

// Uniformly random perfect matching on the half-edges: Fisher-Yates shuffle
// of the stub array, then pair consecutive entries. Every matching of the
// (sum d - 1)!! has equal probability.
inline HalfEdgeGraph match_half_edges(const std::vector<std::int32_t>& degrees,
                                      Rng& rng) {
    HalfEdgeGraph g;
    g.n = static_cast<vertex_t>(degrees.size());
    g.degrees = degrees;
    g.stub_offset.resize(degrees.size() + 1);
    g.stub_offset[0] = 0;
    for (std::size_t v = 0; v < degrees.size(); ++v) {
        if (degrees[v] < 0) throw std::invalid_argument("negative degree");
        g.stub_offset[v + 1] = g.stub_offset[v] + degrees[v];
    }
    const stub_t total = g.stub_offset.back();
    if (total % 2 != 0) throw std::invalid_argument("degree sum must be even");

    g.stub_vertex.resize(static_cast<std::size_t>(total));
    for (std::size_t v = 0; v < degrees.size(); ++v)
        for (stub_t h = g.stub_offset[v]; h < g.stub_offset[v + 1]; ++h)
            g.stub_vertex[static_cast<std::size_t>(h)] = static_cast<vertex_t>(v);

    std::vector<stub_t> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), stub_t{0});
    for (stub_t i = total - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[rng.below(static_cast<std::uint64_t>(i) + 1)]);

    g.pairing.resize(static_cast<std::size_t>(total));
    g.stub_edge.resize(static_cast<std::size_t>(total));
    std::vector<std::pair<stub_t, stub_t>> pairs;
    pairs.reserve(static_cast<std::size_t>(total / 2));
    for (stub_t i = 0; i < total; i += 2) {
        const stub_t a = order[static_cast<std::size_t>(i)];
        const stub_t b = order[static_cast<std::size_t>(i + 1)];
        g.pairing[static_cast<std::size_t>(a)] = b;
        g.pairing[static_cast<std::size_t>(b)] = a;
        pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(pairs.begin(), pairs.end());
    g.edge_stub.resize(pairs.size());
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        g.edge_stub[e] = pairs[e].first;
        g.stub_edge[static_cast<std::size_t>(pairs[e].first)] = static_cast<edge_t>(e);
        g.stub_edge[static_cast<std::size_t>(pairs[e].second)] = static_cast<edge_t>(e);
    }
    return g;
}

inline HalfEdgeGraph generate_graph(const DegreeModel& d, vertex_t n, Rng& rng) {
    return match_half_edges(sample_degrees(d, n, rng), rng);
}

// Empirical size-biased forward-degree law g^{(n)}_k = sum_v (k+1) 1{d_v=k+1} / L_n.
inline std::vector<double> forward_degree_empirical(const HalfEdgeGraph& g) {
    const auto ln = static_cast<double>(g.stub_count());
    std::int32_t dmax = 0;
    for (auto deg : g.degrees) dmax = std::max(dmax, deg);
    std::vector<double> out(dmax > 0 ? static_cast<std::size_t>(dmax) : 1, 0.0);
    for (auto deg : g.degrees)
        if (deg >= 1)
            out[static_cast<std::size_t>(deg - 1)] += static_cast<double>(deg) / ln;
    return out;
}

} // namespace cfpp
