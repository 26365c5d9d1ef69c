#pragma once

// Per-eigenvalue verdicts: which eigenvalues the Weyl matrix sees, with which
// rank, and whether the multiplicity bounds in terms of the cyclomatic number
// and the non-resonance criterion hold.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "edge_ode.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "spectral.hpp"
#include "weyl.hpp"

namespace qgraph {

enum class Verdict { Pass, Fail, NotApplicable };

inline const char* to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::Pass:
        return "PASS";
    case Verdict::Fail:
        return "FAIL";
    case Verdict::NotApplicable:
        return "NA";
    }
    return "?";
}

inline Verdict verdict_of(bool ok) noexcept { return ok ? Verdict::Pass : Verdict::Fail; }

struct RecoveryReport {
    double lambda = 0.0;
    int dim_ker = 0;
    int rank_res = 0;
    int scar_dim = 0;
    /// 2 cyc(G) + |dG| - |B| - 1; zero in the tree / B = dG case.
    int bound = 0;
    /// Tree with B equal to the whole boundary: multiplicity equals residue rank.
    bool tree_full_boundary = false;
    /// B is a subset of the boundary (hypothesis of the boundary theorem).
    bool boundary_hypothesis = false;
    Verdict poles_are_eigenvalues = Verdict::NotApplicable;
    Verdict high_multiplicity_visible = Verdict::NotApplicable;
    Verdict multiplicity_bounds = Verdict::NotApplicable;
    bool resonance = false;
    /// B contains the boundary and all proper core vertices, and lambda is no resonance.
    bool non_resonant_applicable = false;
    Verdict full_recovery = Verdict::NotApplicable;
    /// dim ker = rank Res + dim ker gamma.
    bool rank_identity = false;
    /// ran gamma_lambda = ran Res_lambda M.
    bool ranges_equal = false;
    /// Experimental bound rank <= dim <= rank + cyc for a cyclically connected graph plus one
    /// pendant edge (alpha = 0, B = dG).
    Verdict cyclic_pendant_bound = Verdict::NotApplicable;

    bool any_failure() const noexcept {
        return poles_are_eigenvalues == Verdict::Fail || high_multiplicity_visible == Verdict::Fail ||
               multiplicity_bounds == Verdict::Fail || full_recovery == Verdict::Fail ||
               !rank_identity;
    }
};

struct PoleProbe {
    double mu = 0.0;
    int rank = 0;
    /// The probe point coincides with a located eigenvalue.
    bool matched = false;
};

struct ScanResult {
    Spectrum spectrum;
    std::vector<RecoveryReport> reports;
    /// Refined sigma_min minima that were probed for poles.
    std::vector<PoleProbe> pole_sweep;
    /// Per-eigenvalue failures that did not abort the scan.
    std::vector<std::pair<double, std::string>> errors;

    int false_poles() const noexcept {
        int n = 0;
        for (const auto& p : pole_sweep)
            n += p.rank > 0 && !p.matched;
        return n;
    }
};

/// lambda is a Dirichlet eigenvalue of every edge of some cycle.
inline bool detect_resonance(const MetricGraph& g, double lambda, double tol = 1e-9) {
    std::vector<int> hits;
    for (int j = 0; j < g.edge_count(); ++j)
        if (is_dirichlet_eigenvalue(g.edges[j], lambda, tol))
            hits.push_back(j);
    return edge_subset_has_cycle(g, hits);
}

/// Continued-fraction test: no p/q with q <= max_denominator matches a/b to rel_tol.
/// Advisory only; rational independence cannot be decided in floating point.
inline bool rationally_independent_hint(double a, double b, long max_denominator = 1000,
                                        double rel_tol = 1e-9) {
    double x = a / b;
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    const double target = x;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(x);
        const auto ai = static_cast<long>(fl);
        const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
        if (q2 > max_denominator)
            return true;
        if (std::abs(static_cast<double>(p2) / static_cast<double>(q2) - target) <=
            rel_tol * std::abs(target))
            return false;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double frac = x - fl;
        if (frac < 1e-15)
            return false;
        x = 1.0 / frac;
    }
    return true;
}

/// Laplacian hypothesis for full recovery: every cycle contains two edges with
/// rationally independent lengths. Equivalent to: no commensurability class of
/// edges contains a cycle. Advisory (see rationally_independent_hint).
inline bool laplacian_resonance_free_hint(const MetricGraph& g, long max_denominator = 1000) {
    for (const auto& e : g.edges)
        if (!(e.potential.is_constant() && e.potential.values.front() == 0.0))
            return false;
    std::vector<int> cls(g.edges.size(), -1);
    int next = 0;
    for (int j = 0; j < g.edge_count(); ++j) {
        if (cls[j] >= 0)
            continue;
        cls[j] = next;
        for (int k = j + 1; k < g.edge_count(); ++k)
            if (cls[k] < 0 &&
                !rationally_independent_hint(g.edges[j].length, g.edges[k].length, max_denominator))
                cls[k] = next;
        ++next;
    }
    for (int c = 0; c < next; ++c) {
        std::vector<int> members;
        for (int j = 0; j < g.edge_count(); ++j)
            if (cls[j] == c)
                members.push_back(j);
        if (edge_subset_has_cycle(g, members))
            return false;
    }
    return true;
}

namespace detail {

/// Edge subsets (bitmasks) forming a single simple cycle; exhaustive, r <= 16.
inline std::vector<unsigned> simple_cycles(const MetricGraph& g, const std::vector<int>& edges) {
    std::vector<unsigned> out;
    const auto n = edges.size();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> deg(static_cast<std::size_t>(g.vertex_count), 0);
        std::vector<int> sub;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                const auto& e = g.edges[edges[i]];
                ++deg[e.origin];
                ++deg[e.terminus];
                sub.push_back(edges[i]);
            }
        if (std::any_of(deg.begin(), deg.end(), [](int d) { return d != 0 && d != 2; }))
            continue;
        // Connected 2-regular edge set is a single cycle.
        DisjointSets sets(g.vertex_count);
        for (int j : sub)
            sets.unite(g.edges[j].origin, g.edges[j].terminus);
        int root = -1;
        bool connected = true;
        for (int v = 0; v < g.vertex_count && connected; ++v)
            if (deg[v] != 0) {
                const int r = sets.find(v);
                if (root < 0)
                    root = r;
                else if (r != root)
                    connected = false;
            }
        if (connected)
            out.push_back(mask);
    }
    return out;
}

} // namespace detail

/// True if the graph is a cyclically connected graph (every two edges lie on a
/// common cycle) with exactly one pendant edge attached. Exhaustive, r <= 8.
inline bool is_cyclic_plus_pendant(const MetricGraph& g) {
    if (g.edge_count() > 8)
        return false;
    const auto boundary = boundary_vertices(g);
    if (boundary.size() != 1)
        return false;
    const int leaf = boundary.members.front();
    std::vector<int> rest;
    for (int j = 0; j < g.edge_count(); ++j)
        if (g.edges[j].origin != leaf && g.edges[j].terminus != leaf)
            rest.push_back(j);
    if (rest.size() + 1 != g.edges.size() || rest.empty())
        return false;
    const auto cycles = detail::simple_cycles(g, rest);
    for (std::size_t a = 0; a < rest.size(); ++a)
        for (std::size_t b = a; b < rest.size(); ++b) {
            const unsigned want = (1u << a) | (1u << b);
            if (std::none_of(cycles.begin(), cycles.end(),
                             [&](unsigned c) { return (c & want) == want; }))
                return false;
        }
    return true;
}

/// Full verdict for one eigenvalue.
inline RecoveryReport recovery_report(const MetricGraph& g, const VertexConditions& alpha,
                                      const VertexSet& B, double lambda,
                                      const ResidueOptions& opt = ResidueOptions{}) {
    validate(g, alpha);
    validate_vertex_set(g, B);
    const auto boundary = boundary_vertices(g);
    const int cyc = cyclomatic_number(g);

    RecoveryReport rep;
    rep.lambda = lambda;
    const auto gamma = gamma_matrix(g, alpha, B, lambda);
    const auto res = residue(g, alpha, B, lambda, opt);
    rep.dim_ker = gamma.rank + gamma.kernel_dimension;
    rep.rank_res = res.rank;
    rep.scar_dim = gamma.kernel_dimension;
    rep.rank_identity = rep.dim_ker == rep.rank_res + rep.scar_dim;
    // Rank zero on both sides means both ranges are {0}; the SVD bases would only see noise.
    if (gamma.rank == 0 || res.rank == 0)
        rep.ranges_equal = gamma.rank == res.rank;
    else
        rep.ranges_equal = subspace_equal(gamma.entries.transpose(), res.matrix);

    rep.boundary_hypothesis = B.is_subset_of(boundary);
    rep.tree_full_boundary = cyc == 0 && B == boundary;
    rep.bound = rep.tree_full_boundary ? 0 : 2 * cyc + boundary.size() - B.size() - 1;
    if (rep.boundary_hypothesis) {
        rep.poles_are_eigenvalues = verdict_of(rep.rank_res == 0 || rep.dim_ker > 0);
        rep.high_multiplicity_visible =
            verdict_of(!(rep.dim_ker > rep.bound) || rep.rank_res >= 1);
        rep.multiplicity_bounds =
            rep.tree_full_boundary
                ? verdict_of(rep.dim_ker == rep.rank_res)
                : verdict_of(rep.rank_res <= rep.dim_ker && rep.dim_ker <= rep.rank_res + rep.bound);
    }

    rep.resonance = detect_resonance(g, lambda);
    VertexSet required = boundary;
    for (int v : proper_core_vertices(g).members)
        required.members.push_back(v);
    required = VertexSet(required.members);
    rep.non_resonant_applicable = required.is_subset_of(B) && !rep.resonance;
    if (rep.non_resonant_applicable)
        rep.full_recovery = verdict_of(rep.dim_ker == rep.rank_res);

    const bool standard =
        std::all_of(alpha.alpha.begin(), alpha.alpha.end(), [](double a) { return a == 0.0; });
    if (standard && B == boundary && is_cyclic_plus_pendant(g))
        rep.cyclic_pendant_bound =
            verdict_of(rep.rank_res <= rep.dim_ker && rep.dim_ker <= rep.rank_res + cyc);
    return rep;
}

/// Residue options with the probe offset capped at 1/100 of the distance from
/// `lambda` to the nearest other eigenvalue in `neighbours`.
inline ResidueOptions residue_options_near(const std::vector<SpectrumEntry>& neighbours,
                                           double lambda) {
    ResidueOptions opt;
    const double same = 1e-6 * std::max(1.0, std::abs(lambda));
    for (const auto& e : neighbours) {
        const double d = std::abs(e.lambda - lambda);
        if (d >= same)
            opt.max_offset = std::min(opt.max_offset, d / 100.0);
    }
    return opt;
}

/// Eigenvalues of [lo, hi] plus those within `pad` outside it, for offset caps.
inline std::vector<SpectrumEntry> padded_neighbours(const MetricGraph& g,
                                                    const VertexConditions& alpha,
                                                    const Spectrum& inside, double pad) {
    auto out = inside.entries;
    for (const auto& side : {find_eigenvalues(g, alpha, inside.lo - pad, inside.lo, inside.grid_step),
                             find_eigenvalues(g, alpha, inside.hi, inside.hi + pad, inside.grid_step)})
        out.insert(out.end(), side.entries.begin(), side.entries.end());
    return out;
}

/// One report per located eigenvalue in [lo, hi] plus a pole sweep over the
/// sigma_min minima of the search grid.
inline ScanResult scan_report(const MetricGraph& g, const VertexConditions& alpha,
                              const VertexSet& B, double lo, double hi, double grid_step) {
    validate(g, alpha);
    validate_vertex_set(g, B);
    ScanResult out;
    out.spectrum = find_eigenvalues(g, alpha, lo, hi, grid_step);
    const auto& eigs = out.spectrum.entries;
    // Eigenvalues just outside the window also limit the probe offsets.
    const auto neighbours = padded_neighbours(g, alpha, out.spectrum, 20.0 * grid_step);
    for (std::size_t k = 0; k < eigs.size(); ++k) {
        try {
            out.reports.push_back(recovery_report(g, alpha, B, eigs[k].lambda,
                                                  residue_options_near(neighbours, eigs[k].lambda)));
        } catch (const Error& err) {
            out.errors.emplace_back(eigs[k].lambda, err.what());
        }
    }

    const auto scan = scan_secular(g, alpha, lo, hi, grid_step);
    const auto n = static_cast<long>(scan.grid.size()) - 1;
    for (long i = 0; i <= n; ++i) {
        if (!scan.is_local_minimum(i))
            continue;
        const double l = scan.grid[std::max<long>(i - 1, 0)];
        const double r = scan.grid[std::min<long>(i + 1, n)];
        const double mu = refine_sigma_minimum(g, alpha, l, r).first;
        PoleProbe probe;
        probe.mu = mu;
        const double tol = 1e-6 * std::max(1.0, std::abs(mu));
        probe.matched = std::any_of(eigs.begin(), eigs.end(), [&](const SpectrumEntry& e) {
            return std::abs(e.lambda - mu) < tol;
        });
        try {
            probe.rank = residue(g, alpha, B, mu, residue_options_near(neighbours, mu)).rank;
        } catch (const Error& err) {
            out.errors.emplace_back(mu, err.what());
            continue;
        }
        out.pole_sweep.push_back(probe);
    }
    return out;
}

inline ScanResult scan_report(const MetricGraph& g, const VertexConditions& alpha,
                              const VertexSet& B, double lo, double hi) {
    return scan_report(g, alpha, B, lo, hi, default_grid_step(g));
}

} // namespace qgraph
