#pragma once

// Bond percolation and cluster accounting on half-edge multigraphs: Bernoulli
// edge retention, a union-find census with positive-stub counts, and the
// longest run of degree-2 vertices (isolated paths).

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cfpp/graphgen.hpp"
#include "cfpp/rng.hpp"

namespace cfpp {

// i.i.d. Bernoulli(p) retention per edge; self-loops included (they never
// affect connectivity but do enter the degree identity).
inline std::vector<std::uint8_t> percolate(const HalfEdgeGraph& g, double p,
                                           Rng& rng) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0,1]");
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(g.edge_count()));
    for (auto& bit : mask) bit = (p >= 1.0) ? 1 : (p > 0.0 && rng.uniform01() < p);
    return mask;
}

struct ClusterRecord {
    std::int64_t size = 0;        // vertex count
    std::int64_t zero_edges = 0;  // retained internal edges, self-loops included
    std::int64_t pos_stubs = 0;   // P^+ = sum of degrees - 2 * zero_edges
    vertex_t min_vertex = 0;      // smallest member id, for the sort tiebreak
};

struct ClusterCensus {
    std::vector<ClusterRecord> clusters;  // sorted by size desc, min vertex asc
    std::vector<std::int64_t> cluster_of; // vertex -> index into clusters
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

} // namespace detail

// Union-find census of the retained-edge clusters. Clusters are sorted by
// vertex count descending, ties by smallest contained vertex id.
inline ClusterCensus cluster_census(const HalfEdgeGraph& g,
                                    const std::vector<std::uint8_t>& mask) {
    if (mask.size() != static_cast<std::size_t>(g.edge_count()))
        throw std::invalid_argument("mask not aligned to edge set");

    detail::UnionFind uf(static_cast<std::size_t>(g.n));
    for (edge_t e = 0; e < g.edge_count(); ++e)
        if (mask[static_cast<std::size_t>(e)] && !g.is_self_loop(e))
            uf.unite(static_cast<std::size_t>(g.edge_u(e)),
                     static_cast<std::size_t>(g.edge_v(e)));

    std::vector<std::int64_t> index_of_root(static_cast<std::size_t>(g.n), -1);
    ClusterCensus census;
    census.cluster_of.resize(static_cast<std::size_t>(g.n));
    for (vertex_t v = 0; v < g.n; ++v) {
        const std::size_t root = uf.find(static_cast<std::size_t>(v));
        std::int64_t idx = index_of_root[root];
        if (idx < 0) {
            idx = static_cast<std::int64_t>(census.clusters.size());
            index_of_root[root] = idx;
            census.clusters.push_back(ClusterRecord{0, 0, 0, v});
        }
        auto& rec = census.clusters[static_cast<std::size_t>(idx)];
        rec.size += 1;
        rec.pos_stubs += g.degrees[static_cast<std::size_t>(v)];
        census.cluster_of[static_cast<std::size_t>(v)] = idx;
    }
    for (edge_t e = 0; e < g.edge_count(); ++e) {
        if (!mask[static_cast<std::size_t>(e)]) continue;
        const auto idx = census.cluster_of[static_cast<std::size_t>(g.edge_u(e))];
        auto& rec = census.clusters[static_cast<std::size_t>(idx)];
        rec.zero_edges += 1;
        rec.pos_stubs -= 2;  // both endpoints of a retained edge are zero stubs
    }

    // Re-sort and remap.
    std::vector<std::int64_t> order(census.clusters.size());
    std::iota(order.begin(), order.end(), std::int64_t{0});
    std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        const auto& ca = census.clusters[static_cast<std::size_t>(a)];
        const auto& cb = census.clusters[static_cast<std::size_t>(b)];
        if (ca.size != cb.size) return ca.size > cb.size;
        return ca.min_vertex < cb.min_vertex;
    });
    std::vector<std::int64_t> rank(order.size());
    for (std::size_t r = 0; r < order.size(); ++r)
        rank[static_cast<std::size_t>(order[r])] = static_cast<std::int64_t>(r);
    std::vector<ClusterRecord> sorted(census.clusters.size());
    for (std::size_t i = 0; i < census.clusters.size(); ++i)
        sorted[static_cast<std::size_t>(rank[i])] = census.clusters[i];
    census.clusters.swap(sorted);
    for (auto& idx : census.cluster_of) idx = rank[static_cast<std::size_t>(idx)];
    return census;
}

// Length (vertex count) of the longest chain of degree-2 vertices. A maximal
// connected set of degree-2 vertices forms either a path or a cycle in the
// multigraph; either way its vertex count is reported.
inline std::int64_t isolated_path_census(const HalfEdgeGraph& g) {
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(g.n), 0);
    std::int64_t longest = 0;
    std::vector<vertex_t> stack;
    for (vertex_t v = 0; v < g.n; ++v) {
        if (g.degrees[static_cast<std::size_t>(v)] != 2 ||
            visited[static_cast<std::size_t>(v)])
            continue;
        std::int64_t run = 0;
        stack.assign(1, v);
        visited[static_cast<std::size_t>(v)] = 1;
        while (!stack.empty()) {
            const vertex_t x = stack.back();
            stack.pop_back();
            ++run;
            for (stub_t h = g.stub_offset[static_cast<std::size_t>(x)];
                 h < g.stub_offset[static_cast<std::size_t>(x) + 1]; ++h) {
                const vertex_t y = g.stub_vertex[static_cast<std::size_t>(
                    g.pairing[static_cast<std::size_t>(h)])];
                if (g.degrees[static_cast<std::size_t>(y)] == 2 &&
                    !visited[static_cast<std::size_t>(y)]) {
                    visited[static_cast<std::size_t>(y)] = 1;
                    stack.push_back(y);
                }
            }
        }
        longest = std::max(longest, run);
    }
    return longest;
}

} // namespace cfpp
