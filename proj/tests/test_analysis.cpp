#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qgraph/qgraph.hpp"

using namespace qgraph;

namespace {

VertexConditions standard(const MetricGraph& g) { return VertexConditions::standard(g.vertex_count); }

MetricGraph triangle_with_pendant() {
    return MetricGraph{{Edge{1.0, 0, 1}, Edge{M_SQRT2, 1, 2}, Edge{M_PI / 2, 2, 0}, Edge{M_E / 2, 0, 3}}, 4};
}

} // namespace

TEST(Resonance, DoubleEdgeAndLassoLoop) {
    const auto d = catalog::double_edge();
    for (const double l : {1.0, 4.0, 9.0})
        EXPECT_TRUE(detect_resonance(d, l)) << l;
    EXPECT_FALSE(detect_resonance(d, 0.0));
    EXPECT_FALSE(detect_resonance(d, 2.25));
    const auto lasso = catalog::lasso();
    EXPECT_TRUE(detect_resonance(lasso, 4.0));
    EXPECT_TRUE(detect_resonance(lasso, 1.0));
    EXPECT_FALSE(detect_resonance(lasso, 2.5));
    EXPECT_FALSE(detect_resonance(catalog::star(), 4.0));
}

TEST(Resonance, StemEigenvalueIsNotResonant) {
    // pi^2 is a Dirichlet eigenvalue of the unit stem but not of the pi-loop.
    EXPECT_FALSE(detect_resonance(catalog::lasso(), M_PI * M_PI));
}

TEST(Commensurability, RationalIndependenceHint) {
    EXPECT_FALSE(rationally_independent_hint(1.0, 2.0));
    EXPECT_FALSE(rationally_independent_hint(3.0 * M_PI, 7.0 * M_PI));
    EXPECT_FALSE(rationally_independent_hint(M_SQRT2, 2.0 * M_SQRT2));
    EXPECT_TRUE(rationally_independent_hint(M_PI, 1.0));
    EXPECT_TRUE(rationally_independent_hint(M_SQRT2, 1.0));
    EXPECT_TRUE(rationally_independent_hint(std::sqrt(3.0), M_E));
}

TEST(Commensurability, LaplacianResonanceFreeHint) {
    EXPECT_TRUE(laplacian_resonance_free_hint(triangle_with_pendant()));
    EXPECT_FALSE(laplacian_resonance_free_hint(catalog::double_edge()));
    // A loop is a cycle by itself.
    EXPECT_FALSE(laplacian_resonance_free_hint(catalog::lasso()));
    EXPECT_TRUE(laplacian_resonance_free_hint(catalog::star()));
    auto g = triangle_with_pendant();
    g.edges[0].potential = PotentialSpec::constant(1.0);
    EXPECT_FALSE(laplacian_resonance_free_hint(g));
}

TEST(CyclicPendant, Recognition) {
    EXPECT_TRUE(is_cyclic_plus_pendant(catalog::lasso()));
    EXPECT_TRUE(is_cyclic_plus_pendant(triangle_with_pendant()));
    EXPECT_FALSE(is_cyclic_plus_pendant(catalog::star()));
    EXPECT_FALSE(is_cyclic_plus_pendant(catalog::cycle_with_pendants()));
    EXPECT_FALSE(is_cyclic_plus_pendant(catalog::two_loop()));
    EXPECT_FALSE(is_cyclic_plus_pendant(catalog::double_edge()));
}

TEST(Report, LassoInvisibleEigenvalues) {
    const auto g = catalog::lasso();
    for (const double l : {4.0, 16.0}) {
        const auto r = recovery_report(g, standard(g), VertexSet({0}), l);
        EXPECT_EQ(r.dim_ker, 1) << l;
        EXPECT_EQ(r.rank_res, 0) << l;
        EXPECT_EQ(r.scar_dim, 1) << l;
        EXPECT_EQ(r.bound, 1);
        EXPECT_TRUE(r.boundary_hypothesis);
        EXPECT_EQ(r.multiplicity_bounds, Verdict::Pass);
        EXPECT_EQ(r.high_multiplicity_visible, Verdict::Pass);
        EXPECT_EQ(r.cyclic_pendant_bound, Verdict::Pass);
        EXPECT_TRUE(r.resonance);
        EXPECT_TRUE(r.rank_identity);
        EXPECT_TRUE(r.ranges_equal);
        EXPECT_FALSE(r.any_failure());
    }
}

TEST(Report, StarScars) {
    const auto g = catalog::star();
    for (const double l : {1.0, 9.0}) {
        const auto r = recovery_report(g, standard(g), VertexSet({0}), l);
        EXPECT_EQ(r.rank_res, 0) << l;
        EXPECT_EQ(r.scar_dim, 1) << l;
        EXPECT_FALSE(r.any_failure());
    }
    // Full boundary on a tree: the residue sees everything.
    const auto full = scan_report(g, standard(g), VertexSet({0, 1, 2}), -0.5, 10.0);
    ASSERT_FALSE(full.reports.empty());
    for (const auto& r : full.reports) {
        EXPECT_TRUE(r.tree_full_boundary);
        EXPECT_EQ(r.dim_ker, r.rank_res) << r.lambda;
        EXPECT_EQ(r.multiplicity_bounds, Verdict::Pass);
    }
}

TEST(Report, StarTwoLeaves) {
    const auto g = catalog::star();
    const auto s = scan_report(g, standard(g), VertexSet({0, 1}), -0.5, 10.0);
    EXPECT_TRUE(s.errors.empty());
    for (const auto& r : s.reports)
        EXPECT_EQ(r.dim_ker, r.rank_res) << r.lambda;
}

TEST(Report, TwoLoopAtOne) {
    const auto g = catalog::two_loop();
    const auto one = recovery_report(g, standard(g), VertexSet({1}), 1.0);
    EXPECT_EQ(one.dim_ker, 4);
    EXPECT_EQ(one.rank_res, 0);
    EXPECT_EQ(one.bound, 4);
    EXPECT_EQ(one.multiplicity_bounds, Verdict::Pass);
    EXPECT_EQ(one.high_multiplicity_visible, Verdict::Pass);
    const auto two = recovery_report(g, standard(g), VertexSet({0, 1}), 1.0);
    EXPECT_EQ(two.dim_ker, 4);
    EXPECT_EQ(two.rank_res, 1);
    EXPECT_EQ(two.scar_dim, 3);
    EXPECT_EQ(two.bound, 3);
    EXPECT_EQ(two.multiplicity_bounds, Verdict::Pass);
    EXPECT_TRUE(two.ranges_equal);
}

TEST(Report, DoubleEdgeResonanceAndRecovery) {
    const auto g = catalog::double_edge();
    const VertexSet B({0, 1});
    // The boundary is empty, so B is not inside it.
    const auto zero = recovery_report(g, standard(g), B, 0.0);
    EXPECT_FALSE(zero.boundary_hypothesis);
    EXPECT_EQ(zero.multiplicity_bounds, Verdict::NotApplicable);
    EXPECT_TRUE(zero.non_resonant_applicable);
    EXPECT_EQ(zero.full_recovery, Verdict::Pass);
    for (const double l : {1.0, 4.0, 9.0}) {
        const auto r = recovery_report(g, standard(g), B, l);
        EXPECT_EQ(r.dim_ker, 2);
        EXPECT_EQ(r.rank_res, 1);
        EXPECT_TRUE(r.resonance);
        EXPECT_FALSE(r.non_resonant_applicable);
        EXPECT_EQ(r.full_recovery, Verdict::NotApplicable);
    }
}

TEST(Report, ConstantPotentialLasso) {
    for (const auto& [l1, l2] : {std::pair{1.0, 1.0}, std::pair{2.0, 3.0}, std::pair{1.0, M_PI}}) {
        auto g = catalog::lasso(l1, l2);
        g.edges[0].potential = PotentialSpec::constant(4 * M_PI * M_PI / (l2 * l2) - 2 * M_PI * M_PI / (l1 * l1));
        const double lambda = 4 * M_PI * M_PI / (l2 * l2);
        EXPECT_LT(sigma_min(g, standard(g), lambda), 1e-8);
        const auto r = recovery_report(g, standard(g), VertexSet({0}), lambda);
        EXPECT_EQ(r.rank_res, 0) << l1 << " " << l2;
        EXPECT_GE(r.scar_dim, 1);
    }
}

TEST(Report, RejectsBadInput) {
    const auto g = catalog::lasso();
    EXPECT_THROW(recovery_report(g, standard(g), VertexSet({5}), 4.0), GraphError);
    EXPECT_THROW(recovery_report(g, standard(g), VertexSet{}, 4.0), GraphError);
}

TEST(Scan, LassoHasNoFalsePoles) {
    const auto g = catalog::lasso();
    const auto s = scan_report(g, standard(g), VertexSet({0}), 0.5, 20.0);
    EXPECT_TRUE(s.errors.empty());
    EXPECT_EQ(s.false_poles(), 0);
    EXPECT_EQ(s.reports.size(), s.spectrum.entries.size());
    int invisible = 0;
    for (const auto& r : s.reports) {
        EXPECT_FALSE(r.any_failure()) << r.lambda;
        if (r.rank_res == 0) {
            ++invisible;
            EXPECT_TRUE(std::abs(r.lambda - 4.0) < 1e-9 || std::abs(r.lambda - 16.0) < 1e-9) << r.lambda;
        }
    }
    EXPECT_EQ(invisible, 2);
}

TEST(Scan, RandomGraphsSatisfyInequalities) {
    std::mt19937 rng(41);
    for (int k = 0; k < 8; ++k) {
        const auto c = oracle::random_graph(rng, 6);
        auto B = boundary_vertices(c.graph);
        if (B.empty())
            B = VertexSet({0});
        const auto s = scan_report(c.graph, c.alpha, B, 0.0, 20.0);
        EXPECT_TRUE(s.errors.empty()) << k;
        EXPECT_EQ(s.false_poles(), 0) << k;
        for (const auto& r : s.reports) {
            EXPECT_FALSE(r.any_failure()) << k << " " << r.lambda;
            EXPECT_TRUE(r.ranges_equal) << k << " " << r.lambda;
        }
    }
}

TEST(Scan, TrianglePendantBound) {
    const auto g = triangle_with_pendant();
    const auto s = scan_report(g, standard(g), boundary_vertices(g), 0.0, 30.0);
    ASSERT_FALSE(s.reports.empty());
    for (const auto& r : s.reports)
        EXPECT_EQ(r.cyclic_pendant_bound, Verdict::Pass) << r.lambda;
}
