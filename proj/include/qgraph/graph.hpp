#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "potential.hpp"

namespace qgraph {

/// An edge [0, length] running from vertex `origin` (x = 0) to `terminus` (x = length).
struct Edge {
    double length = 1.0;
    int origin = 0;
    int terminus = 0;
    PotentialSpec potential{};

    bool is_loop() const noexcept { return origin == terminus; }

    bool operator==(const Edge&) const = default;
};

/// Finite compact metric graph. Vertices are the integers 0..vertex_count-1.
struct MetricGraph {
    std::vector<Edge> edges;
    int vertex_count = 0;

    int edge_count() const noexcept { return static_cast<int>(edges.size()); }

    double max_length() const noexcept {
        double l = 0.0;
        for (const auto& e : edges)
            l = std::max(l, e.length);
        return l;
    }

    double total_length() const noexcept {
        double l = 0.0;
        for (const auto& e : edges)
            l += e.length;
        return l;
    }

    bool operator==(const MetricGraph&) const = default;
};

/// Strengths of the delta couplings, one per vertex.
struct VertexConditions {
    std::vector<double> alpha;

    static VertexConditions standard(int vertex_count) {
        return VertexConditions{std::vector<double>(static_cast<std::size_t>(vertex_count), 0.0)};
    }

    bool operator==(const VertexConditions&) const = default;
};

/// Ordered set of distinct vertex indices.
struct VertexSet {
    std::vector<int> members;

    VertexSet() = default;
    explicit VertexSet(std::vector<int> m) : members(std::move(m)) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
    }

    int size() const noexcept { return static_cast<int>(members.size()); }
    bool empty() const noexcept { return members.empty(); }
    bool contains(int v) const noexcept {
        return std::binary_search(members.begin(), members.end(), v);
    }
    bool is_subset_of(const VertexSet& other) const noexcept {
        return std::includes(other.members.begin(), other.members.end(), members.begin(),
                             members.end());
    }

    bool operator==(const VertexSet&) const = default;
};

/// Edge and vertex indices of the core (largest subgraph without degree-one vertices).
struct CoreSubgraph {
    std::vector<int> edges;
    std::vector<int> vertices;

    bool empty() const noexcept { return edges.empty(); }
};

namespace detail {

class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<int> parent_;
};

inline void check_vertex(const MetricGraph& g, int v) {
    if (v < 0 || v >= g.vertex_count)
        throw GraphError(GraphError::Kind::IndexOutOfRange,
                         "vertex index " + std::to_string(v) + " out of range [0, " +
                             std::to_string(g.vertex_count) + ")");
}

} // namespace detail

/// Vertex partition into connected components, each sorted, ordered by smallest member.
inline std::vector<std::vector<int>> connected_components(const MetricGraph& g) {
    detail::DisjointSets sets(g.vertex_count);
    for (const auto& e : g.edges)
        sets.unite(e.origin, e.terminus);
    std::vector<std::vector<int>> out;
    std::vector<int> slot(static_cast<std::size_t>(g.vertex_count), -1);
    for (int v = 0; v < g.vertex_count; ++v) {
        const int root = sets.find(v);
        if (slot[root] < 0) {
            slot[root] = static_cast<int>(out.size());
            out.emplace_back();
        }
        out[slot[root]].push_back(v);
    }
    return out;
}

/// Throws GraphError unless every structural invariant holds and the graph is connected.
inline void validate(const MetricGraph& g) {
    using Kind = GraphError::Kind;
    if (g.vertex_count <= 0 || g.edges.empty())
        throw GraphError(Kind::DanglingVertexIndex, "graph needs at least one edge and one vertex");
    for (std::size_t j = 0; j < g.edges.size(); ++j) {
        const auto& e = g.edges[j];
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            throw GraphError(Kind::NonPositiveLength,
                             "edge " + std::to_string(j) + " has non-positive length");
        if (e.origin < 0 || e.origin >= g.vertex_count || e.terminus < 0 ||
            e.terminus >= g.vertex_count)
            throw GraphError(Kind::DanglingVertexIndex,
                             "edge " + std::to_string(j) + " references a vertex outside [0, " +
                                 std::to_string(g.vertex_count) + ")");
        if (!e.potential.valid_for(e.length))
            throw GraphError(Kind::InvalidPotential,
                             "edge " + std::to_string(j) + " has an invalid potential");
    }
    auto comps = connected_components(g);
    if (comps.size() > 1)
        throw GraphError(Kind::DisconnectedGraph,
                         "graph has " + std::to_string(comps.size()) + " connected components",
                         std::move(comps));
}

inline void validate(const MetricGraph& g, const VertexConditions& alpha) {
    validate(g);
    if (alpha.alpha.size() != static_cast<std::size_t>(g.vertex_count))
        throw GraphError(GraphError::Kind::InvalidVertexConditions,
                         "expected " + std::to_string(g.vertex_count) + " coupling strengths, got " +
                             std::to_string(alpha.alpha.size()));
    for (double a : alpha.alpha)
        if (!std::isfinite(a))
            throw GraphError(GraphError::Kind::InvalidVertexConditions,
                             "coupling strengths must be finite");
}

/// Checks that `b` is a nonempty set of valid vertex indices of `g`.
inline void validate_vertex_set(const MetricGraph& g, const VertexSet& b) {
    if (b.empty())
        throw GraphError(GraphError::Kind::InvalidVertexSet, "vertex set B must be nonempty");
    if (b.members.front() < 0 || b.members.back() >= g.vertex_count)
        throw GraphError(GraphError::Kind::InvalidVertexSet, "vertex set B references unknown vertex");
}

/// Number of edge endpoints at `v`; a loop counts twice.
inline int degree(const MetricGraph& g, int v) {
    detail::check_vertex(g, v);
    int d = 0;
    for (const auto& e : g.edges)
        d += (e.origin == v) + (e.terminus == v);
    return d;
}

inline std::vector<int> degrees(const MetricGraph& g) {
    std::vector<int> d(static_cast<std::size_t>(g.vertex_count), 0);
    for (const auto& e : g.edges) {
        ++d[e.origin];
        ++d[e.terminus];
    }
    return d;
}

/// The degree-one vertices, in index order.
inline VertexSet boundary_vertices(const MetricGraph& g) {
    const auto d = degrees(g);
    std::vector<int> out;
    for (int v = 0; v < g.vertex_count; ++v)
        if (d[v] == 1)
            out.push_back(v);
    return VertexSet(std::move(out));
}

/// 1 + r - s; rejects disconnected graphs.
inline int cyclomatic_number(const MetricGraph& g) {
    auto comps = connected_components(g);
    if (comps.size() != 1)
        throw GraphError(GraphError::Kind::DisconnectedGraph,
                         "cyclomatic number requires a connected graph", std::move(comps));
    return 1 + g.edge_count() - g.vertex_count;
}

inline bool is_tree(const MetricGraph& g) { return cyclomatic_number(g) == 0; }

/// Repeatedly strips degree-one vertices together with their edge.
inline CoreSubgraph core_subgraph(const MetricGraph& g) {
    auto deg = degrees(g);
    std::vector<char> alive(g.edges.size(), 1);
    std::vector<std::vector<int>> incident(static_cast<std::size_t>(g.vertex_count));
    for (int j = 0; j < g.edge_count(); ++j) {
        incident[g.edges[j].origin].push_back(j);
        if (!g.edges[j].is_loop())
            incident[g.edges[j].terminus].push_back(j);
    }
    std::vector<int> leaves;
    for (int v = 0; v < g.vertex_count; ++v)
        if (deg[v] == 1)
            leaves.push_back(v);
    while (!leaves.empty()) {
        const int v = leaves.back();
        leaves.pop_back();
        if (deg[v] != 1)
            continue;
        for (int j : incident[v]) {
            if (!alive[j])
                continue;
            alive[j] = 0;
            const auto& e = g.edges[j];
            const int other = e.origin == v ? e.terminus : e.origin;
            --deg[v];
            if (--deg[other] == 1)
                leaves.push_back(other);
            break;
        }
    }
    CoreSubgraph core;
    for (int j = 0; j < g.edge_count(); ++j)
        if (alive[j])
            core.edges.push_back(j);
    for (int v = 0; v < g.vertex_count; ++v)
        if (deg[v] > 0)
            core.vertices.push_back(v);
    return core;
}

/// Vertices all of whose incident edges lie in the core.
inline VertexSet proper_core_vertices(const MetricGraph& g) {
    const auto core = core_subgraph(g);
    std::vector<char> in_core(g.edges.size(), 0);
    for (int j : core.edges)
        in_core[j] = 1;
    std::vector<int> out;
    for (int v : core.vertices) {
        bool proper = true;
        for (int j = 0; j < g.edge_count() && proper; ++j) {
            const auto& e = g.edges[j];
            if ((e.origin == v || e.terminus == v) && !in_core[j])
                proper = false;
        }
        if (proper)
            out.push_back(v);
    }
    return VertexSet(std::move(out));
}

/// True iff the subgraph formed by `edges` contains a cycle (loops and parallel edges count).
inline bool edge_subset_has_cycle(const MetricGraph& g, std::span<const int> edges) {
    // A forest has #edges == #vertices - #components; any union that closes a
    // component is a witness.
    detail::DisjointSets sets(g.vertex_count);
    for (int j : edges) {
        if (j < 0 || j >= g.edge_count())
            throw GraphError(GraphError::Kind::IndexOutOfRange,
                             "edge index " + std::to_string(j) + " out of range");
        const auto& e = g.edges[j];
        if (!sets.unite(e.origin, e.terminus))
            return true;
    }
    return false;
}

} // namespace qgraph
