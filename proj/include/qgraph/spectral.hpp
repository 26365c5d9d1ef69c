#pragma once

// Global eigenvalue problem for the Schroedinger operator with delta couplings.
//
// Unknowns are the coefficients (a_j, b_j) of f_j = a_j c_j + b_j s_j on every
// edge. Each vertex v contributes deg(v) - 1 continuity rows and one flux row,
// so the secular matrix is square of size 2r.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include "edge_ode.hpp"
#include "errors.hpp"
#include "graph.hpp"

namespace qgraph {

/// Relative singular value below which a direction counts as a kernel vector.
inline constexpr double kRankThreshold = 1e-8;
/// Relative refinement tolerance for located eigenvalues.
inline constexpr double kRefineTolerance = 1e-10;
/// A refined sigma_min minimum below this is accepted as an eigenvalue.
inline constexpr double kMinimumAcceptThreshold = 1e-6;

/// One endpoint of an edge as seen from a vertex.
struct EdgeEnd {
    int edge = 0;
    bool at_terminus = false;
};

enum class RowKind { Continuity, Flux };

struct RowLedgerEntry {
    int vertex = 0;
    RowKind kind = RowKind::Flux;
};

struct SecularMatrix {
    cplx mu{};
    Eigen::MatrixXcd entries;
    std::vector<RowLedgerEntry> rows;
};

struct SpectrumEntry {
    double lambda = 0.0;
    int multiplicity = 1;
};

struct Spectrum {
    std::vector<SpectrumEntry> entries;
    double lo = 0.0;
    double hi = 0.0;
    double grid_step = 0.0;
    /// WindowTooCoarse records and similar diagnostics.
    std::vector<std::string> warnings;

    /// Number of eigenvalues counted with multiplicity.
    int count() const noexcept {
        int n = 0;
        for (const auto& e : entries)
            n += e.multiplicity;
        return n;
    }
};

/// Eigenspace with an L^2(G)-orthonormal basis; column k holds (a_0, b_0, a_1, b_1, ...).
struct Eigenspace {
    double lambda = 0.0;
    Eigen::MatrixXcd basis;

    int dimension() const noexcept { return static_cast<int>(basis.cols()); }
};

/// Incident ends of every vertex, ordered by edge index with the origin end first.
/// The first entry is the canonical representative of the vertex.
inline std::vector<std::vector<EdgeEnd>> vertex_ends(const MetricGraph& g) {
    std::vector<std::vector<EdgeEnd>> ends(static_cast<std::size_t>(g.vertex_count));
    for (int j = 0; j < g.edge_count(); ++j) {
        ends[g.edges[j].origin].push_back({j, false});
        ends[g.edges[j].terminus].push_back({j, true});
    }
    return ends;
}

/// Fundamental data of every edge with the overflow scale folded back in.
inline std::vector<FundamentalData> edge_fundamentals(const MetricGraph& g, cplx mu) {
    std::vector<FundamentalData> out;
    out.reserve(g.edges.size());
    for (const auto& e : g.edges)
        out.push_back(fundamental_system(e, mu).unscaled());
    return out;
}

namespace detail {

/// Row coefficients (on a_j, b_j) of the value at an edge end.
inline std::pair<cplx, cplx> end_value_row(const FundamentalData& fd, bool at_terminus) {
    return at_terminus ? std::pair{fd.c_end, fd.s_end} : std::pair{cplx(1.0), cplx(0.0)};
}

/// Row coefficients of the derivative at an edge end (along the edge direction).
inline std::pair<cplx, cplx> end_derivative_row(const FundamentalData& fd, bool at_terminus) {
    return at_terminus ? std::pair{fd.cp_end, fd.sp_end} : std::pair{cplx(0.0), cplx(1.0)};
}

} // namespace detail

/// Assembles the 2r x 2r secular matrix at `mu`.
inline SecularMatrix assemble_secular(const MetricGraph& g, const VertexConditions& alpha,
                                      cplx mu) {
    validate(g, alpha);
    const int n = 2 * g.edge_count();
    const auto fds = edge_fundamentals(g, mu);
    const auto ends = vertex_ends(g);

    SecularMatrix sm;
    sm.mu = mu;
    sm.entries = Eigen::MatrixXcd::Zero(n, n);
    sm.rows.reserve(static_cast<std::size_t>(n));
    int row = 0;
    for (int v = 0; v < g.vertex_count; ++v) {
        const auto& vend = ends[v];
        const EdgeEnd canon = vend.front();
        const auto [ca, cb] = detail::end_value_row(fds[canon.edge], canon.at_terminus);
        for (std::size_t k = 1; k < vend.size(); ++k) {
            const auto [ea, eb] = detail::end_value_row(fds[vend[k].edge], vend[k].at_terminus);
            sm.entries(row, 2 * vend[k].edge) += ea;
            sm.entries(row, 2 * vend[k].edge + 1) += eb;
            sm.entries(row, 2 * canon.edge) -= ca;
            sm.entries(row, 2 * canon.edge + 1) -= cb;
            sm.rows.push_back({v, RowKind::Continuity});
            ++row;
        }
        for (const auto& end : vend) {
            const auto [da, db] = detail::end_derivative_row(fds[end.edge], end.at_terminus);
            const double sign = end.at_terminus ? 1.0 : -1.0;
            sm.entries(row, 2 * end.edge) += sign * da;
            sm.entries(row, 2 * end.edge + 1) += sign * db;
        }
        sm.entries(row, 2 * canon.edge) -= alpha.alpha[v] * ca;
        sm.entries(row, 2 * canon.edge + 1) -= alpha.alpha[v] * cb;
        sm.rows.push_back({v, RowKind::Flux});
        ++row;
    }
    return sm;
}

/// Row-equilibrated copy of the secular matrix and the applied row factors.
///
/// Rows are divided by max(norm, natural size), where the natural size is 1 for
/// value rows and max(1, sqrt|mu|) for derivative rows. Large (evanescent) rows
/// are normalized; a row that cancels to zero at an eigenvalue stays small, so
/// the kernel remains visible (a loop's periodicity row vanishes identically).
inline std::pair<Eigen::MatrixXcd, Eigen::VectorXd> equilibrate(const SecularMatrix& sm) {
    Eigen::MatrixXcd m = sm.entries;
    Eigen::VectorXd factors(m.rows());
    const double wave = std::max(1.0, std::sqrt(std::abs(sm.mu)));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const bool flux = static_cast<std::size_t>(i) < sm.rows.size() &&
                          sm.rows[i].kind == RowKind::Flux;
        const double nrm = std::max(m.row(i).norm(), flux ? wave : 1.0);
        factors(i) = 1.0 / nrm;
        m.row(i) *= factors(i);
    }
    return {std::move(m), std::move(factors)};
}

/// Reference size for singular values of an equilibrated secular matrix.
///
/// Rows have norm at most 1, so sigma_max is O(1) unless every row cancels at
/// once (a lone loop at a periodic eigenvalue); measuring against sigma_max
/// alone would then hide the kernel.
inline double secular_reference(const Eigen::VectorXd& sv) { return std::max(1.0, sv(0)); }

/// Singular values (descending) of the equilibrated secular matrix.
inline Eigen::VectorXd secular_singular_values(const MetricGraph& g, const VertexConditions& alpha,
                                               cplx mu) {
    const auto m = equilibrate(assemble_secular(g, alpha, mu)).first;
    if (mu.imag() == 0.0) {
        const Eigen::MatrixXd re = m.real();
        return Eigen::JacobiSVD<Eigen::MatrixXd>(re).singularValues();
    }
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
}

/// sigma_min / sigma_max of the (equilibrated) secular matrix.
inline double sigma_min(const MetricGraph& g, const VertexConditions& alpha, cplx mu) {
    const auto sv = secular_singular_values(g, alpha, mu);
    return sv(sv.size() - 1) / secular_reference(sv);
}

/// Number of relative singular values below the kernel threshold.
inline int kernel_dimension(const MetricGraph& g, const VertexConditions& alpha, double lambda) {
    const auto sv = secular_singular_values(g, alpha, cplx(lambda, 0.0));
    int d = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) < kRankThreshold * secular_reference(sv))
            ++d;
    return d;
}

/// Sign of the determinant of the secular matrix at real `lambda` (-1, 0 or +1).
inline int secular_det_sign(const MetricGraph& g, const VertexConditions& alpha, double lambda) {
    const Eigen::MatrixXd m = equilibrate(assemble_secular(g, alpha, cplx(lambda, 0.0))).first.real();
    const double det = m.partialPivLu().determinant();
    return (det > 0.0) - (det < 0.0);
}

/// Determinant of the equilibrated secular matrix at real `lambda`.
inline double secular_det(const MetricGraph& g, const VertexConditions& alpha, double lambda) {
    const Eigen::MatrixXd m = equilibrate(assemble_secular(g, alpha, cplx(lambda, 0.0))).first.real();
    return m.partialPivLu().determinant();
}

/// 0.05 (pi / L_max)^2.
inline double default_grid_step(const MetricGraph& g) {
    const double u = M_PI / g.max_length();
    return 0.05 * u * u;
}

namespace detail {

inline double refine_tolerance(double x) { return kRefineTolerance * 1e-2 * std::max(1.0, std::abs(x)); }

template <class F>
double bisect_sign(F&& sign_at, double l, double r, int sign_l) {
    while (r - l > refine_tolerance(l)) {
        const double m = 0.5 * (l + r);
        const int sm = sign_at(m);
        if (sm == 0)
            return m;
        if (sm == sign_l)
            l = m;
        else
            r = m;
    }
    return 0.5 * (l + r);
}

template <class F>
std::pair<double, double> golden_minimize(F&& f, double l, double r) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = r - inv_phi * (r - l), x2 = l + inv_phi * (r - l);
    double f1 = f(x1), f2 = f(x2);
    while (r - l > refine_tolerance(l)) {
        if (f1 <= f2) {
            r = x2;
            x2 = x1;
            f2 = f1;
            x1 = r - inv_phi * (r - l);
            f1 = f(x1);
        } else {
            l = x1;
            x1 = x2;
            f1 = f2;
            x2 = l + inv_phi * (r - l);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

} // namespace detail

/// Refines a local minimum of sigma_min inside [l, r].
inline std::pair<double, double> refine_sigma_minimum(const MetricGraph& g,
                                                       const VertexConditions& alpha, double l,
                                                       double r) {
    return detail::golden_minimize(
        [&](double x) { return sigma_min(g, alpha, cplx(x, 0.0)); }, l, r);
}

/// Secular matrix sampled on a uniform grid of real spectral parameters.
struct SecularScan {
    std::vector<double> grid;
    /// Relative smallest singular value of the equilibrated matrix.
    std::vector<double> sigma_min;
    std::vector<double> det;
    std::vector<int> det_sign;

    bool is_local_minimum(long i) const {
        const auto n = static_cast<long>(grid.size()) - 1;
        const bool left_ok = i == 0 || sigma_min[i] <= sigma_min[i - 1];
        const bool right_ok = i == n || sigma_min[i] <= sigma_min[i + 1];
        return left_ok && right_ok;
    }
};

inline SecularScan scan_secular(const MetricGraph& g, const VertexConditions& alpha, double lo,
                                double hi, double grid_step) {
    validate(g, alpha);
    if (!(lo < hi) || !(grid_step > 0.0))
        throw Error("secular scan: need lo < hi and grid_step > 0");
    const auto n = static_cast<long>(std::ceil((hi - lo) / grid_step));
    SecularScan scan;
    scan.grid.resize(static_cast<std::size_t>(n + 1));
    scan.sigma_min.resize(scan.grid.size());
    scan.det.resize(scan.grid.size());
    scan.det_sign.resize(scan.grid.size());
    for (long i = 0; i <= n; ++i) {
        const double x =
            i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        scan.grid[i] = x;
        const auto m = equilibrate(assemble_secular(g, alpha, cplx(x, 0.0))).first;
        const Eigen::MatrixXd re = m.real();
        const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(re).singularValues();
        scan.sigma_min[i] = sv(sv.size() - 1) / secular_reference(sv);
        const double det = re.partialPivLu().determinant();
        scan.det[i] = det;
        scan.det_sign[i] = (det > 0.0) - (det < 0.0);
    }
    return scan;
}

/// Eigenvalues in [lo, hi] with multiplicities.
///
/// Combines determinant sign changes (odd multiplicities) with refined local
/// minima of sigma_min (any multiplicity) on a uniform grid.
inline Spectrum find_eigenvalues(const MetricGraph& g, const VertexConditions& alpha, double lo,
                                 double hi, double grid_step) {
    const auto scan = scan_secular(g, alpha, lo, hi, grid_step);
    const auto& grid = scan.grid;
    const auto& dsign = scan.det_sign;
    const auto n = static_cast<long>(grid.size()) - 1;

    struct Candidate {
        double lambda;
        bool from_sign_change;
    };
    std::vector<Candidate> cand;
    const auto sign_at = [&](double x) { return secular_det_sign(g, alpha, x); };
    for (long i = 0; i < n; ++i) {
        if (dsign[i] != 0 && dsign[i + 1] != 0 && dsign[i] != dsign[i + 1])
            cand.push_back({detail::bisect_sign(sign_at, grid[i], grid[i + 1], dsign[i]), true});
    }
    for (long i = 0; i <= n; ++i) {
        if (!scan.is_local_minimum(i))
            continue;
        const double l = grid[std::max<long>(i - 1, 0)];
        const double r = grid[std::min<long>(i + 1, n)];
        const auto [x, fx] = refine_sigma_minimum(g, alpha, l, r);
        if (fx < kMinimumAcceptThreshold)
            cand.push_back({x, false});
    }
    std::sort(cand.begin(), cand.end(),
              [](const Candidate& a, const Candidate& b) { return a.lambda < b.lambda; });

    Spectrum spec;
    spec.lo = lo;
    spec.hi = hi;
    spec.grid_step = grid_step;
    std::vector<Candidate> merged;
    for (const auto& c : cand) {
        if (!merged.empty() &&
            std::abs(c.lambda - merged.back().lambda) < 1e-7 * std::max(1.0, std::abs(c.lambda))) {
            if (c.from_sign_change && !merged.back().from_sign_change)
                merged.back() = c;
            continue;
        }
        merged.push_back(c);
    }
    for (const auto& c : merged) {
        if (c.lambda < lo || c.lambda > hi)
            continue;
        const int mult = std::max(1, kernel_dimension(g, alpha, c.lambda));
        spec.entries.push_back({c.lambda, mult});
    }
    for (std::size_t k = 1; k < spec.entries.size(); ++k) {
        const double gap = spec.entries[k].lambda - spec.entries[k - 1].lambda;
        if (gap < 2.0 * grid_step)
            spec.warnings.push_back("WindowTooCoarse: eigenvalues " +
                                    std::to_string(spec.entries[k - 1].lambda) + " and " +
                                    std::to_string(spec.entries[k].lambda) +
                                    " are closer than twice the grid step");
    }
    return spec;
}

inline Spectrum find_eigenvalues(const MetricGraph& g, const VertexConditions& alpha, double lo,
                                 double hi) {
    return find_eigenvalues(g, alpha, lo, hi, default_grid_step(g));
}

/// L^2(G) Gram matrix of coefficient vectors (columns) at real lambda.
inline Eigen::MatrixXcd l2_gram(const MetricGraph& g, double lambda, const Eigen::MatrixXcd& coeffs) {
    const auto d = coeffs.cols();
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(d, d);
    for (int j = 0; j < g.edge_count(); ++j) {
        const auto m = fundamental_gram(g.edges[j], lambda);
        Eigen::Matrix2d ge;
        ge << m[0], m[1], m[1], m[2];
        const Eigen::MatrixXcd block = coeffs.middleRows(2 * j, 2);
        gram += block.adjoint() * ge * block;
    }
    return gram;
}

/// Orthonormal basis of ker(A - lambda).
inline Eigenspace eigenspace(const MetricGraph& g, const VertexConditions& alpha, double lambda) {
    const auto m = equilibrate(assemble_secular(g, alpha, cplx(lambda, 0.0))).first;
    const Eigen::MatrixXd re = m.real();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(re, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int d = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) < kRankThreshold * secular_reference(sv))
            ++d;
    if (d == 0)
        throw NotAnEigenvalue("no kernel at lambda = " + std::to_string(lambda));
    const Eigen::MatrixXcd raw = svd.matrixV().rightCols(d).cast<cplx>();
    const Eigen::MatrixXcd gram = l2_gram(g, lambda, raw);
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw NumericalError("eigenspace Gram matrix is not positive definite");
    // raw * L^{-H} has identity Gram matrix.
    const Eigen::MatrixXcd linv_h =
        llt.matrixU().solve(Eigen::MatrixXcd::Identity(d, d));
    return Eigenspace{lambda, raw * linv_h};
}

/// Values of each coefficient column at every edge end, keyed like vertex_ends().
inline Eigen::MatrixXcd vertex_values(const MetricGraph& g, double lambda,
                                      const Eigen::MatrixXcd& coeffs) {
    const auto fds = edge_fundamentals(g, cplx(lambda, 0.0));
    const auto ends = vertex_ends(g);
    Eigen::MatrixXcd out(coeffs.cols(), g.vertex_count);
    for (Eigen::Index k = 0; k < coeffs.cols(); ++k) {
        double mag = 0.0;
        std::vector<std::vector<cplx>> per_end(static_cast<std::size_t>(g.vertex_count));
        for (int v = 0; v < g.vertex_count; ++v) {
            for (const auto& end : ends[v]) {
                const auto [ea, eb] = detail::end_value_row(fds[end.edge], end.at_terminus);
                const cplx val = ea * coeffs(2 * end.edge, k) + eb * coeffs(2 * end.edge + 1, k);
                per_end[v].push_back(val);
                mag = std::max(mag, std::abs(val));
            }
        }
        const double tol = kRankThreshold * std::max(1.0, mag);
        for (int v = 0; v < g.vertex_count; ++v) {
            for (const auto& val : per_end[v])
                if (std::abs(val - per_end[v].front()) > tol)
                    throw ContinuityViolation("basis function " + std::to_string(k) +
                                              " is discontinuous at vertex " + std::to_string(v));
            out(k, v) = per_end[v].front();
        }
    }
    return out;
}

/// Values of the eigenspace basis at every vertex (rows: basis, columns: vertices).
inline Eigen::MatrixXcd vertex_values(const Eigenspace& space, const MetricGraph& g) {
    return vertex_values(g, space.lambda, space.basis);
}

/// Per-vertex residual of the delta condition d_nu f(v) - alpha_v f(v) for each column.
inline Eigen::MatrixXcd flux_defects(const MetricGraph& g, const VertexConditions& alpha, cplx mu,
                                     const Eigen::MatrixXcd& coeffs) {
    const auto fds = edge_fundamentals(g, mu);
    const auto ends = vertex_ends(g);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(coeffs.cols(), g.vertex_count);
    for (Eigen::Index k = 0; k < coeffs.cols(); ++k) {
        for (int v = 0; v < g.vertex_count; ++v) {
            cplx flux = 0.0;
            for (const auto& end : ends[v]) {
                const auto [da, db] = detail::end_derivative_row(fds[end.edge], end.at_terminus);
                const cplx d = da * coeffs(2 * end.edge, k) + db * coeffs(2 * end.edge + 1, k);
                flux += end.at_terminus ? d : -d;
            }
            const auto canon = ends[v].front();
            const auto [ca, cb] = detail::end_value_row(fds[canon.edge], canon.at_terminus);
            const cplx val = ca * coeffs(2 * canon.edge, k) + cb * coeffs(2 * canon.edge + 1, k);
            out(k, v) = flux - alpha.alpha[v] * val;
        }
    }
    return out;
}

} // namespace qgraph
