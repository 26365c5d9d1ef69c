#pragma once

// Titchmarsh-Weyl (Neumann-to-Dirichlet type) matrix on a vertex set B and its
// pole structure on the real axis.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "errors.hpp"
#include "graph.hpp"
#include "spectral.hpp"

namespace qgraph {

/// Relative singular value threshold used for residue ranks.
inline constexpr double kResidueRankThreshold = 1e-6;
/// Residues below this fraction of the local M scale are treated as zero.
inline constexpr double kResidueZeroThreshold = 1e-8;
/// Digits a residue probe solve may lose before the estimate is rejected.
inline constexpr double kMaxDigitsLost = 6.0;

struct WeylMatrix {
    cplx mu{};
    VertexSet B;
    Eigen::MatrixXcd entries;
};

/// Solution of the inhomogeneous vertex problem: per-edge coefficients (a_j, b_j).
struct VertexBvpSolution {
    cplx mu{};
    Eigen::VectorXcd coefficients;
    /// max(1, sigma_max) / sigma_min of the equilibrated secular matrix.
    double condition = 1.0;
};

struct ResidueEstimate {
    double lambda = 0.0;
    VertexSet B;
    Eigen::MatrixXcd matrix;
    int rank = 0;
    /// sup over the witness probes of |eps^2 M(lambda + i eps)|.
    double pole_order_witness = 0.0;
    /// |M(lambda + 0.1 i)|, the reference for the zero test.
    double local_scale = 0.0;
    /// Largest condition number met by the extrapolation probes.
    double probe_condition = 1.0;
};

struct GammaMatrix {
    double lambda = 0.0;
    VertexSet B;
    /// Rows: orthonormal eigenbasis; columns: vertices of B.
    Eigen::MatrixXcd entries;
    int rank = 0;
    /// dim ker gamma_lambda (number of independent scars).
    int kernel_dimension = 0;
};

/// Result of evaluating M at a real point in the least-squares sense.
struct ContinuationProbe {
    WeylMatrix value;
    /// Relative residual of the least-squares solves; small iff M continues analytically.
    double consistency_residual = 0.0;
    /// Kernel dimension of the secular matrix at the probe point.
    int kernel_dimension = 0;
};

struct ResidueOptions {
    /// Base probe offset is base_offset * max(1, |lambda|).
    double base_offset = 1e-4;
    /// Number of probes in the Richardson ladder eps, eps/2, eps/4, ...
    int levels = 4;
    /// Upper bound on the probe offset (e.g. a fraction of the gap to the next eigenvalue).
    double max_offset = std::numeric_limits<double>::infinity();
    /// Offsets used for the pole-order witness.
    std::vector<double> witness_offsets{1e-6, 1e-7};
    /// Distance of the reference point lambda + i * scale_offset for the zero test.
    double scale_offset = 0.1;
};

namespace detail {

struct SecularSolve {
    Eigen::MatrixXcd coefficients;
    Eigen::VectorXd singular_values;
};

/// Right-hand side with one column per entry of `sources`, h placed on flux rows.
inline Eigen::MatrixXcd flux_rhs(const SecularMatrix& sm, const Eigen::MatrixXcd& h) {
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(sm.entries.rows(), h.cols());
    for (std::size_t r = 0; r < sm.rows.size(); ++r)
        if (sm.rows[r].kind == RowKind::Flux)
            rhs.row(static_cast<Eigen::Index>(r)) = h.row(sm.rows[r].vertex);
    return rhs;
}

/// Solves the secular system with h (s x k) on the flux rows, no uniqueness check.
inline SecularSolve solve_flux_system(const MetricGraph& g, const VertexConditions& alpha, cplx mu,
                                      const Eigen::MatrixXcd& h) {
    const auto sm = assemble_secular(g, alpha, mu);
    auto [m, factors] = equilibrate(sm);
    const Eigen::MatrixXcd rhs = factors.asDiagonal() * flux_rhs(sm, h);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return SecularSolve{svd.solve(rhs), svd.singularValues()};
}

/// Values at the vertices of B of each coefficient column (rows: B, columns: solutions).
inline Eigen::MatrixXcd values_at(const MetricGraph& g, cplx mu, const VertexSet& B,
                                  const Eigen::MatrixXcd& coeffs) {
    const auto fds = edge_fundamentals(g, mu);
    const auto ends = vertex_ends(g);
    Eigen::MatrixXcd out(B.size(), coeffs.cols());
    for (int k = 0; k < B.size(); ++k) {
        const auto canon = ends[B.members[k]].front();
        const auto [ca, cb] = end_value_row(fds[canon.edge], canon.at_terminus);
        out.row(k) = ca * coeffs.row(2 * canon.edge) + cb * coeffs.row(2 * canon.edge + 1);
    }
    return out;
}

inline Eigen::MatrixXcd unit_sources(const MetricGraph& g, const VertexSet& B) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(g.vertex_count, B.size());
    for (int l = 0; l < B.size(); ++l)
        h(B.members[l], l) = 1.0;
    return h;
}

inline double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0)
        return 0.0;
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

inline int numerical_rank(const Eigen::MatrixXcd& m, double abs_floor, double rel) {
    if (m.size() == 0)
        return 0;
    const auto sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
    if (sv(0) <= abs_floor)
        return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) >= rel * sv(0))
            ++r;
    return r;
}

/// M(mu) without the uniqueness check; reports the secular condition number.
inline WeylMatrix tw_matrix_unchecked(const MetricGraph& g, const VertexConditions& alpha,
                                      const VertexSet& B, cplx mu, double* condition = nullptr) {
    const auto sol = solve_flux_system(g, alpha, mu, unit_sources(g, B));
    const auto& sv = sol.singular_values;
    if (condition != nullptr)
        *condition = sv(sv.size() - 1) > 0.0 ? secular_reference(sv) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
    return WeylMatrix{mu, B, values_at(g, mu, B, sol.coefficients)};
}

} // namespace detail

/// Unique solution of L f = mu f, continuous, with d_nu f(v) - alpha_v f(v) = h_v.
inline VertexBvpSolution solve_vertex_bvp(const MetricGraph& g, const VertexConditions& alpha,
                                          cplx mu, const Eigen::VectorXcd& h) {
    validate(g, alpha);
    if (h.size() != g.vertex_count)
        throw Error("solve_vertex_bvp: h must have one entry per vertex");
    const auto sol = detail::solve_flux_system(g, alpha, mu, h);
    const auto& sv = sol.singular_values;
    if (sv(sv.size() - 1) <= kRankThreshold * secular_reference(sv))
        throw AtEigenvalue("vertex problem is not uniquely solvable at mu = (" +
                           std::to_string(mu.real()) + ", " + std::to_string(mu.imag()) + ")");
    return VertexBvpSolution{mu, sol.coefficients.col(0), secular_reference(sv) / sv(sv.size() - 1)};
}

/// Value of a BVP solution at every vertex.
inline Eigen::VectorXcd solution_vertex_values(const MetricGraph& g, const VertexBvpSolution& sol) {
    Eigen::VectorXcd out(g.vertex_count);
    std::vector<int> all(static_cast<std::size_t>(g.vertex_count));
    std::iota(all.begin(), all.end(), 0);
    const auto vals = detail::values_at(g, sol.mu, VertexSet(all), sol.coefficients);
    for (int v = 0; v < g.vertex_count; ++v)
        out(v) = vals(v, 0);
    return out;
}

/// M_{B,alpha}(mu); column l holds the values at B of the solution with h = e_{B_l}.
inline WeylMatrix tw_matrix(const MetricGraph& g, const VertexConditions& alpha, const VertexSet& B,
                            cplx mu) {
    validate(g, alpha);
    validate_vertex_set(g, B);
    double cond = 0.0;
    auto w = detail::tw_matrix_unchecked(g, alpha, B, mu, &cond);
    if (!(cond * kRankThreshold < 1.0))
        throw AtEigenvalue("M is not defined at an eigenvalue, mu = (" + std::to_string(mu.real()) +
                           ", " + std::to_string(mu.imag()) + ")");
    for (Eigen::Index i = 0; i < w.entries.size(); ++i)
        if (!std::isfinite(w.entries(i).real()) || !std::isfinite(w.entries(i).imag()))
            throw NumericalError("non-finite Weyl matrix entry");
    return w;
}

/// Evaluates M at a real point in the least-squares sense.
///
/// At an eigenvalue whose eigenfunctions all vanish on B the vertex problem is
/// still solvable and its values on B are unique; the result then coincides
/// with the analytic continuation of M into that point.
inline ContinuationProbe tw_matrix_continuation(const MetricGraph& g, const VertexConditions& alpha,
                                                const VertexSet& B, double lambda) {
    validate(g, alpha);
    validate_vertex_set(g, B);
    const cplx mu(lambda, 0.0);
    const auto sm = assemble_secular(g, alpha, mu);
    auto [m, factors] = equilibrate(sm);
    const Eigen::MatrixXcd rhs = factors.asDiagonal() * detail::flux_rhs(sm, detail::unit_sources(g, B));
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // Eigen's threshold is relative to sigma_max; rescale it to secular_reference.
    const double top = svd.singularValues()(0);
    svd.setThreshold(top > 0.0 ? kRankThreshold * secular_reference(svd.singularValues()) / top
                               : kRankThreshold);
    const Eigen::MatrixXcd x = svd.solve(rhs);
    const double res = (m * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
    const auto& sv = svd.singularValues();
    int kd = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) < kRankThreshold * secular_reference(sv))
            ++kd;
    return ContinuationProbe{WeylMatrix{mu, B, detail::values_at(g, mu, B, x)}, res, kd};
}

/// Residue of M at real `lambda` by Richardson extrapolation of i eps M(lambda + i eps).
inline ResidueEstimate residue(const MetricGraph& g, const VertexConditions& alpha,
                               const VertexSet& B, double lambda,
                               const ResidueOptions& opt = ResidueOptions{}) {
    validate(g, alpha);
    validate_vertex_set(g, B);
    const int levels = std::max(2, opt.levels);
    const double eps0 = std::min(opt.base_offset * std::max(1.0, std::abs(lambda)), opt.max_offset);

    ResidueEstimate est;
    est.lambda = lambda;
    est.B = B;

    // Neville table in eps with ratio 2; row k uses eps0 / 2^k.
    std::vector<Eigen::MatrixXcd> prev, cur;
    for (int k = 0; k < levels; ++k) {
        const double eps = eps0 / std::ldexp(1.0, k);
        double cond = 0.0;
        const auto w = detail::tw_matrix_unchecked(g, alpha, B, cplx(lambda, eps), &cond);
        est.probe_condition = std::max(est.probe_condition, cond);
        cur.assign(1, cplx(0.0, eps) * w.entries);
        for (int j = 1; j <= k; ++j) {
            const double f = std::ldexp(1.0, j);
            cur.push_back((f * cur[j - 1] - prev[j - 1]) / (f - 1.0));
        }
        prev = cur;
    }
    if (std::log10(est.probe_condition) > kMaxDigitsLost)
        throw ProbeIllConditioned("residue probes at lambda = " + std::to_string(lambda) +
                                  " lose too many digits (condition " +
                                  std::to_string(est.probe_condition) + ")");
    est.matrix = prev.back();

    est.local_scale = detail::spectral_norm(
        detail::tw_matrix_unchecked(g, alpha, B, cplx(lambda, opt.scale_offset)).entries);
    est.rank = detail::numerical_rank(est.matrix, kResidueZeroThreshold * est.local_scale,
                                      kResidueRankThreshold);
    for (double eps : opt.witness_offsets) {
        const auto w = detail::tw_matrix_unchecked(g, alpha, B, cplx(lambda, eps));
        est.pole_order_witness =
            std::max(est.pole_order_witness, eps * eps * detail::spectral_norm(w.entries));
    }
    return est;
}

/// Eigenfunction values on B for an orthonormal eigenbasis, and the scar count.
inline GammaMatrix gamma_matrix(const MetricGraph& g, const VertexConditions& alpha,
                                const VertexSet& B, double lambda) {
    validate_vertex_set(g, B);
    const auto space = eigenspace(g, alpha, lambda);
    const auto values = vertex_values(space, g);
    GammaMatrix gm;
    gm.lambda = lambda;
    gm.B = B;
    gm.entries.resize(values.rows(), B.size());
    for (int l = 0; l < B.size(); ++l)
        gm.entries.col(l) = values.col(B.members[l]);
    // Normalized eigenfunctions have vertex values of order 1/sqrt(total length).
    const double floor = kResidueRankThreshold / std::sqrt(g.total_length());
    gm.rank = detail::numerical_rank(gm.entries, floor, kResidueRankThreshold);
    gm.kernel_dimension = space.dimension() - gm.rank;
    return gm;
}

/// True iff the column spans of U and V coincide (all principal angles below tol).
inline bool subspace_equal(const Eigen::MatrixXcd& U, const Eigen::MatrixXcd& V, double tol = 1e-5,
                           double rank_tol = kResidueRankThreshold) {
    if (U.rows() != V.rows())
        throw Error("subspace_equal: row counts differ");
    const auto basis = [&](const Eigen::MatrixXcd& A) -> Eigen::MatrixXcd {
        if (A.cols() == 0)
            return Eigen::MatrixXcd(A.rows(), 0);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        Eigen::Index r = 0;
        const double floor = std::max(rank_tol * sv(0), std::numeric_limits<double>::min());
        while (r < sv.size() && sv(r) > floor)
            ++r;
        return svd.matrixU().leftCols(r);
    };
    const auto qu = basis(U);
    const auto qv = basis(V);
    if (qu.cols() != qv.cols())
        return false;
    if (qu.cols() == 0)
        return true;
    const Eigen::MatrixXcd residual = qv - qu * (qu.adjoint() * qv);
    return detail::spectral_norm(residual) < std::sin(tol);
}

} // namespace qgraph
