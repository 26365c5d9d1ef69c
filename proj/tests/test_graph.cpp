#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "qgraph/qgraph.hpp"

using namespace qgraph;

namespace {

GraphError::Kind kind_of(const MetricGraph& g) {
    try {
        validate(g);
    } catch (const GraphError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "graph unexpectedly valid";
    return GraphError::Kind::IndexOutOfRange;
}

} // namespace

TEST(Validate, AcceptsCatalogGraphs) {
    for (const auto& g : {catalog::interval(), catalog::loop(), catalog::lasso(), catalog::star(),
                          catalog::double_edge(), catalog::two_loop(),
                          catalog::cycle_with_pendants()})
        EXPECT_NO_THROW(validate(g, VertexConditions::standard(g.vertex_count)));
}

TEST(Validate, RejectsBadLengths) {
    EXPECT_EQ(kind_of(MetricGraph{{Edge{-1.0, 0, 1}}, 2}), GraphError::Kind::NonPositiveLength);
    EXPECT_EQ(kind_of(MetricGraph{{Edge{0.0, 0, 1}}, 2}), GraphError::Kind::NonPositiveLength);
    EXPECT_EQ(kind_of(MetricGraph{{Edge{NAN, 0, 1}}, 2}), GraphError::Kind::NonPositiveLength);
}

TEST(Validate, RejectsDanglingVertex) {
    EXPECT_EQ(kind_of(MetricGraph{{Edge{1.0, 0, 2}}, 2}), GraphError::Kind::DanglingVertexIndex);
    EXPECT_EQ(kind_of(MetricGraph{{}, 1}), GraphError::Kind::DanglingVertexIndex);
}

TEST(Validate, ReportsComponentsOfDisconnectedGraph) {
    const MetricGraph g{{Edge{1.0, 0, 1}, Edge{1.0, 2, 3}, Edge{1.0, 3, 4}}, 5};
    try {
        validate(g);
        FAIL();
    } catch (const GraphError& e) {
        EXPECT_EQ(e.kind(), GraphError::Kind::DisconnectedGraph);
        const std::vector<std::vector<int>> want{{0, 1}, {2, 3, 4}};
        EXPECT_EQ(e.components(), want);
    }
    EXPECT_THROW(cyclomatic_number(g), GraphError);
}

TEST(Validate, RejectsBadPotential) {
    Edge e{1.0, 0, 1};
    e.potential = PotentialSpec{{0.5, 0.4}, {1.0, 2.0, 3.0}};
    EXPECT_EQ(kind_of(MetricGraph{{e}, 2}), GraphError::Kind::InvalidPotential);
    e.potential = PotentialSpec{{1.0}, {1.0, 2.0}};
    EXPECT_EQ(kind_of(MetricGraph{{e}, 2}), GraphError::Kind::InvalidPotential);
    e.potential = PotentialSpec{{0.5}, {1.0}};
    EXPECT_EQ(kind_of(MetricGraph{{e}, 2}), GraphError::Kind::InvalidPotential);
}

TEST(Validate, RejectsBadConditionsAndSets) {
    const auto g = catalog::interval();
    EXPECT_THROW(validate(g, VertexConditions{{0.0}}), GraphError);
    EXPECT_THROW(validate(g, VertexConditions{{0.0, INFINITY}}), GraphError);
    EXPECT_THROW(validate_vertex_set(g, VertexSet{}), GraphError);
    EXPECT_THROW(validate_vertex_set(g, VertexSet({2})), GraphError);
}

TEST(Degrees, LoopCountsTwice) {
    const auto g = catalog::lasso();
    EXPECT_EQ(degree(g, 0), 1);
    EXPECT_EQ(degree(g, 1), 3);
    EXPECT_THROW(degree(g, 5), GraphError);
}

TEST(Degrees, HandshakeOnRandomGraphs) {
    std::mt19937 rng(11);
    for (int k = 0; k < 200; ++k) {
        const auto g = oracle::random_graph(rng).graph;
        const auto d = degrees(g);
        EXPECT_EQ(std::accumulate(d.begin(), d.end(), 0), 2 * g.edge_count());
    }
}

TEST(Cyclomatic, PaperGraphs) {
    EXPECT_EQ(cyclomatic_number(catalog::interval()), 0);
    EXPECT_EQ(cyclomatic_number(catalog::lasso()), 1);
    EXPECT_EQ(cyclomatic_number(catalog::star()), 0);
    EXPECT_EQ(cyclomatic_number(catalog::double_edge()), 1);
    EXPECT_EQ(cyclomatic_number(catalog::two_loop()), 2);
    EXPECT_EQ(cyclomatic_number(catalog::cycle_with_pendants()), 1);
    EXPECT_TRUE(is_tree(catalog::star()));
    EXPECT_FALSE(is_tree(catalog::loop()));
}

TEST(Cyclomatic, MatchesSpanningTreeOracle) {
    std::mt19937 rng(12);
    for (int k = 0; k < 300; ++k) {
        const auto g = oracle::random_graph(rng).graph;
        EXPECT_EQ(cyclomatic_number(g), oracle::spanning_tree_excess(g));
    }
}

TEST(Boundary, PaperGraphs) {
    EXPECT_EQ(boundary_vertices(catalog::lasso()), VertexSet({0}));
    EXPECT_EQ(boundary_vertices(catalog::star()), VertexSet({0, 1, 2}));
    EXPECT_TRUE(boundary_vertices(catalog::double_edge()).empty());
    EXPECT_EQ(boundary_vertices(catalog::two_loop()), VertexSet({0, 1}));
}

TEST(Core, PaperGraphs) {
    EXPECT_TRUE(core_subgraph(catalog::star()).empty());
    EXPECT_EQ(core_subgraph(catalog::lasso()).edges, std::vector<int>({1}));
    EXPECT_TRUE(proper_core_vertices(catalog::lasso()).empty());
    // Two-loop: both loops and both arms survive; the bridge 2-3 and the pendants do not.
    EXPECT_EQ(core_subgraph(catalog::two_loop()).edges, std::vector<int>({3, 4, 5, 6}));
    EXPECT_EQ(proper_core_vertices(catalog::two_loop()), VertexSet({4, 5}));
    EXPECT_EQ(proper_core_vertices(catalog::double_edge()), VertexSet({0, 1}));
    EXPECT_TRUE(proper_core_vertices(catalog::cycle_with_pendants()).empty());
}

TEST(Core, MatchesBridgeOracle) {
    std::mt19937 rng(13);
    for (int k = 0; k < 300; ++k) {
        const auto g = oracle::random_graph(rng).graph;
        EXPECT_EQ(core_subgraph(g).edges, oracle::core_edges(g));
    }
}

TEST(Cycles, EdgeSubsets) {
    const auto g = catalog::cycle_with_pendants();
    const std::vector<int> triangle{0, 1, 2}, path{0, 1, 3, 4, 5};
    EXPECT_TRUE(edge_subset_has_cycle(g, triangle));
    EXPECT_FALSE(edge_subset_has_cycle(g, path));
    const auto lasso = catalog::lasso();
    const std::vector<int> ring{1}, stem{0};
    EXPECT_TRUE(edge_subset_has_cycle(lasso, ring));
    EXPECT_FALSE(edge_subset_has_cycle(lasso, stem));
    const std::vector<int> both{0, 1};
    EXPECT_TRUE(edge_subset_has_cycle(catalog::double_edge(), both));
    const std::vector<int> bad{7};
    EXPECT_THROW(edge_subset_has_cycle(g, bad), GraphError);
}

TEST(VertexSetType, SortsAndDeduplicates) {
    const VertexSet b({3, 1, 3, 0});
    EXPECT_EQ(b.members, std::vector<int>({0, 1, 3}));
    EXPECT_TRUE(b.contains(3));
    EXPECT_FALSE(b.contains(2));
    EXPECT_TRUE(VertexSet({1}).is_subset_of(b));
    EXPECT_FALSE(VertexSet({2}).is_subset_of(b));
}
