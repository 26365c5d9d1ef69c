#pragma once

// Small named graphs used throughout the tests, the CLI fixtures and the docs.

#include <cmath>

#include "graph.hpp"

namespace qgraph::catalog {

/// [0, length] with vertices 0 (origin) and 1 (terminus).
inline MetricGraph interval(double length = 1.0) {
    return MetricGraph{{Edge{length, 0, 1}}, 2};
}

/// Single loop of the given length at vertex 0.
inline MetricGraph loop(double length = 2.0 * M_PI) {
    return MetricGraph{{Edge{length, 0, 0}}, 1};
}

/// Pendant edge 0 -> 1 of length `stem` with a loop of length `ring` at vertex 1.
inline MetricGraph lasso(double stem = 1.0, double ring = M_PI) {
    return MetricGraph{{Edge{stem, 0, 1}, Edge{ring, 1, 1}}, 2};
}

/// Three edges ending in a common centre (vertex 3); leaves are 0, 1, 2.
inline MetricGraph star(double l1 = 1.0, double l2 = M_PI / 2, double l3 = M_PI / 2) {
    return MetricGraph{{Edge{l1, 0, 3}, Edge{l2, 1, 3}, Edge{l3, 2, 3}}, 4};
}

/// Two parallel edges between vertices 0 and 1, oriented against each other.
inline MetricGraph double_edge(double l1 = M_PI, double l2 = M_PI) {
    return MetricGraph{{Edge{l1, 0, 1}, Edge{l2, 1, 0}}, 2};
}

/// Two pendant edges (leaves 0 and 1) joined at 2, a bridge 2 -> 3, two arms
/// 3 -> 4 and 3 -> 5, and a loop at each of 4 and 5.
inline MetricGraph two_loop(double l1 = M_PI / 2, double l2 = 1.0, double l3 = M_PI,
                            double l4 = M_PI / 2, double l5 = M_PI / 2, double l6 = 2.0 * M_PI,
                            double l7 = 2.0 * M_PI) {
    return MetricGraph{{Edge{l1, 0, 2}, Edge{l2, 1, 2}, Edge{l3, 2, 3}, Edge{l4, 3, 4},
                        Edge{l5, 3, 5}, Edge{l6, 4, 4}, Edge{l7, 5, 5}},
                       6};
}

/// Triangle 0-1-2 with a pendant edge from each corner to leaves 3, 4, 5.
inline MetricGraph cycle_with_pendants(double c0 = 1.0, double c1 = M_SQRT2, double c2 = M_PI / 2,
                                       double p0 = std::sqrt(3.0), double p1 = M_E / 2,
                                       double p2 = std::sqrt(5.0) / 2) {
    return MetricGraph{{Edge{c0, 0, 1}, Edge{c1, 1, 2}, Edge{c2, 2, 0}, Edge{p0, 0, 3},
                        Edge{p1, 1, 4}, Edge{p2, 2, 5}},
                       6};
}

} // namespace qgraph::catalog
