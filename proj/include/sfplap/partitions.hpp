#pragma once

// Pair partitions, the permutation gamma*pi and the graph a pair partition
// induces on the closed walk 1 -> 2 -> ... -> k -> 1.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace sfplap {

/// Perfect matching of [k] = {1, ..., k}; pairs (r, s) with r < s, ordered by r.
struct PairPartition {
    std::size_t k = 0;
    std::vector<std::pair<int, int>> pairs;

    friend bool operator==(const PairPartition&, const PairPartition&) = default;

    void validate() const {
        if (k % 2 != 0 || pairs.size() * 2 != k) throw std::invalid_argument("pair partition: size mismatch");
        std::vector<int> seen(k + 1, 0);
        for (auto [r, s] : pairs) {
            if (r < 1 || s < 1 || r > static_cast<int>(k) || s > static_cast<int>(k) || r >= s)
                throw std::invalid_argument("pair partition: bad pair");
            if (seen[r]++ || seen[s]++) throw std::invalid_argument("pair partition: element used twice");
        }
    }

    /// The matching as an involution on [k] (index 0 unused).
    std::vector<int> as_permutation() const {
        std::vector<int> perm(k + 1, 0);
        for (auto [r, s] : pairs) {
            perm[r] = s;
            perm[s] = r;
        }
        return perm;
    }
};

/// Set partition of [k]: blocks sorted internally and ordered by minimum element.
using Blocks = std::vector<std::vector<int>>;

inline constexpr std::size_t max_enumeration_size = 16;

namespace detail {

inline void extend_pairings(std::vector<int>& free_elems, std::vector<std::pair<int, int>>& current, std::size_t k,
                            std::vector<PairPartition>& out) {
    if (free_elems.empty()) {
        out.push_back(PairPartition{k, current});
        return;
    }
    const int first = free_elems.front();
    for (std::size_t idx = 1; idx < free_elems.size(); ++idx) {
        const int partner = free_elems[idx];
        std::vector<int> rest;
        rest.reserve(free_elems.size() - 2);
        for (std::size_t t = 1; t < free_elems.size(); ++t)
            if (t != idx) rest.push_back(free_elems[t]);
        current.emplace_back(first, partner);
        extend_pairings(rest, current, k, out);
        current.pop_back();
    }
}

inline void canonicalize(Blocks& blocks) {
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
}

}  // namespace detail

/// All (k-1)!! pair partitions of [k] in lexicographic order; none for odd k and
/// the single empty partition for k = 0.
inline std::vector<PairPartition> enumerate_pair_partitions(std::size_t k) {
    if (k > max_enumeration_size)
        throw std::invalid_argument("enumerate_pair_partitions: k = " + std::to_string(k) + " exceeds the limit of " +
                                    std::to_string(max_enumeration_size));
    std::vector<PairPartition> out;
    if (k % 2 != 0) return out;
    std::vector<int> free_elems(k);
    std::iota(free_elems.begin(), free_elems.end(), 1);
    std::vector<std::pair<int, int>> current;
    detail::extend_pairings(free_elems, current, k, out);
    return out;
}

/// True iff no two pairs (a, b), (c, d) satisfy a < c < b < d.
inline bool is_noncrossing(const PairPartition& p) {
    for (auto [a, b] : p.pairs)
        for (auto [c, d] : p.pairs)
            if (a < c && c < b && b < d) return false;
    return true;
}

inline std::vector<PairPartition> enumerate_noncrossing_pair_partitions(std::size_t k) {
    auto all = enumerate_pair_partitions(k);
    std::erase_if(all, [](const PairPartition& p) { return !is_noncrossing(p); });
    return all;
}

/// Cycles of gamma o pi, where pi swaps each pair and gamma(x) = x + 1 (mod k);
/// pi is applied first.
inline Blocks gamma_pi(const PairPartition& p) {
    p.validate();
    const int k = static_cast<int>(p.k);
    const auto pi = p.as_permutation();
    auto gamma = [k](int x) { return x == k ? 1 : x + 1; };
    std::vector<bool> seen(p.k + 1, false);
    Blocks cycles;
    for (int start = 1; start <= k; ++start) {
        if (seen[start]) continue;
        std::vector<int> cycle;
        for (int x = start; !seen[x]; x = gamma(pi[x])) {
            seen[x] = true;
            cycle.push_back(x);
        }
        cycles.push_back(std::move(cycle));
    }
    detail::canonicalize(cycles);
    return cycles;
}

/// Undirected multigraph obtained by collapsing the walk 1 -> ... -> k -> 1
/// along the blocks of a partition of [k]. Parallel walk steps are merged into
/// one edge with a traversal count.
struct PartitionGraph {
    struct Edge {
        std::size_t u = 0;
        std::size_t v = 0;  // u <= v
        std::size_t traversal_count = 0;
        friend bool operator==(const Edge&, const Edge&) = default;
    };

    std::size_t k = 0;
    Blocks vertices;  // label of each vertex = its block of walk positions
    std::vector<Edge> edges;
    std::size_t root = 0;  // vertex holding walk position 1

    friend bool operator==(const PartitionGraph&, const PartitionGraph&) = default;

    std::size_t vertex_of(int position) const {
        for (std::size_t v = 0; v < vertices.size(); ++v)
            if (std::binary_search(vertices[v].begin(), vertices[v].end(), position)) return v;
        throw std::invalid_argument("position " + std::to_string(position) + " is not on the walk");
    }

    /// Number of distinct neighbours (self-loops count twice).
    std::size_t degree(std::size_t v) const {
        std::size_t d = 0;
        for (const auto& e : edges) d += (e.u == v) + (e.v == v);
        return d;
    }

    std::size_t total_traversals() const {
        std::size_t t = 0;
        for (const auto& e : edges) t += e.traversal_count;
        return t;
    }

    bool connected() const {
        if (vertices.empty()) return false;
        std::vector<std::size_t> parent(vertices.size());
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (const auto& e : edges) parent[find(e.u)] = find(e.v);
        const std::size_t r = find(0);
        for (std::size_t v = 1; v < vertices.size(); ++v)
            if (find(v) != r) return false;
        return true;
    }
};

/// Collapse the closed walk on [k] along an arbitrary partition of [k].
/// k = 0 gives the single root vertex with no edges.
inline PartitionGraph walk_graph(Blocks blocks, std::size_t k) {
    PartitionGraph g;
    g.k = k;
    if (k == 0) {
        g.vertices = {{}};
        return g;
    }
    detail::canonicalize(blocks);
    g.vertices = std::move(blocks);
    std::vector<std::size_t> owner(k + 1, 0);
    std::vector<bool> covered(k + 1, false);
    for (std::size_t v = 0; v < g.vertices.size(); ++v)
        for (int x : g.vertices[v]) {
            if (x < 1 || x > static_cast<int>(k) || covered[x]) throw std::invalid_argument("walk_graph: not a partition of [k]");
            covered[x] = true;
            owner[x] = v;
        }
    for (std::size_t x = 1; x <= k; ++x)
        if (!covered[x]) throw std::invalid_argument("walk_graph: not a partition of [k]");

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> counts;
    for (std::size_t r = 1; r <= k; ++r) {
        std::size_t a = owner[r];
        std::size_t b = owner[r == k ? 1 : r + 1];
        if (a > b) std::swap(a, b);
        ++counts[{a, b}];
    }
    for (const auto& [key, count] : counts) g.edges.push_back({key.first, key.second, count});
    g.root = owner[1];
    return g;
}

inline PartitionGraph partition_graph(const PairPartition& p) {
    if (p.k == 0) return walk_graph({}, 0);
    return walk_graph(gamma_pi(p), p.k);
}

/// True iff g is a tree on k/2 + 1 vertices whose every edge is walked exactly twice.
inline bool is_nc_tree(const PartitionGraph& g, std::size_t k) {
    if (k % 2 != 0) return false;
    if (g.vertices.size() != k / 2 + 1 || g.edges.size() != k / 2) return false;
    for (const auto& e : g.edges)
        if (e.u == e.v || e.traversal_count != 2) return false;
    return g.connected();
}

/// Partition graph with fresh leaves hung off its vertices.
struct AugmentedGraph {
    PartitionGraph base;
    std::vector<std::size_t> leaves;  // per base vertex

    std::size_t total_leaves() const { return std::accumulate(leaves.begin(), leaves.end(), std::size_t{0}); }
    std::size_t degree(std::size_t v) const { return base.degree(v) + leaves[v]; }
    std::size_t edge_count() const { return base.edges.size() + total_leaves(); }
    std::size_t vertex_count() const { return base.vertices.size() + total_leaves(); }
};

/// Attach leaf_counts[v] leaves to base vertex v.
inline AugmentedGraph augment_with_leaves(PartitionGraph g, const std::map<std::size_t, std::size_t>& leaf_counts) {
    AugmentedGraph out;
    out.leaves.assign(g.vertices.size(), 0);
    for (const auto& [v, count] : leaf_counts) {
        if (v >= g.vertices.size()) throw std::invalid_argument("augment_with_leaves: unknown vertex " + std::to_string(v));
        out.leaves[v] = count;
    }
    out.base = std::move(g);
    return out;
}

}  // namespace sfplap
