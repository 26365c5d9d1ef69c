#pragma once

// Solutions of -f'' + q f = mu f on a single edge with piecewise-constant q.
//
// Everything is expressed through the fundamental pair c, s with
// c(0) = 1, c'(0) = 0 and s(0) = 0, s'(0) = 1. Each constant piece has a
// closed-form 2x2 propagator; pieces are composed left to right.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace qgraph {

using cplx = std::complex<double>;

/// Below this |q - mu| a piece uses the linear propagator with a first-order correction.
inline constexpr double kDegeneratePieceThreshold = 1e-12;

/// Growth exponent above which a piece's propagator is stored with a split-off scale.
inline constexpr double kOverflowGuardExponent = 30.0;

/// Values and derivatives at x = L of the fundamental pair.
///
/// When `log_scale` is nonzero the stored entries are the true ones multiplied
/// by exp(-log_scale); this only happens for strongly evanescent edges.
struct FundamentalData {
    cplx mu{};
    cplx c_end{1.0};
    cplx cp_end{0.0};
    cplx s_end{0.0};
    cplx sp_end{1.0};
    double log_scale = 0.0;

    /// c s' - c' s of the stored entries; equals exp(-2 log_scale).
    cplx wronskian() const noexcept { return c_end * sp_end - cp_end * s_end; }

    /// Entries with the scale folded back in.
    FundamentalData unscaled() const {
        if (log_scale == 0.0)
            return *this;
        if (log_scale > 700.0)
            throw NumericalError("fundamental system overflows double range");
        const double f = std::exp(log_scale);
        return FundamentalData{mu, c_end * f, cp_end * f, s_end * f, sp_end * f, 0.0};
    }
};

namespace detail {

/// Row-major 2x2 propagator [[c, s], [c', s']] plus a split-off exponent.
struct Propagator {
    cplx c{1.0}, s{0.0}, cp{0.0}, sp{1.0};
    double log_scale = 0.0;

    /// this := step * this
    void prepend(const Propagator& step) {
        const cplx nc = step.c * c + step.s * cp;
        const cplx ns = step.c * s + step.s * sp;
        const cplx ncp = step.cp * c + step.sp * cp;
        const cplx nsp = step.cp * s + step.sp * sp;
        c = nc;
        s = ns;
        cp = ncp;
        sp = nsp;
        log_scale += step.log_scale;
    }
};

/// Propagator of -f'' + q f = mu f across a constant piece of width h.
inline Propagator piece_propagator(double q, cplx mu, double h) {
    const cplx z = q - mu;
    Propagator p;
    if (std::abs(z) < kDegeneratePieceThreshold) {
        const cplx half = 0.5 * z * h * h;
        p.c = 1.0 + half;
        p.s = h + z * h * h * h / 6.0;
        p.cp = z * h;
        p.sp = 1.0 + half;
        return p;
    }
    if (z.imag() == 0.0) {
        // Real branch keeps real inputs exactly real.
        const double zr = z.real();
        if (zr < 0.0) {
            const double w = std::sqrt(-zr);
            const double cs = std::cos(w * h), sn = std::sin(w * h);
            p.c = cs;
            p.s = sn / w;
            p.cp = -w * sn;
            p.sp = cs;
            return p;
        }
        const double k = std::sqrt(zr);
        const double kh = k * h;
        if (kh > kOverflowGuardExponent) {
            const double e = std::exp(-2.0 * kh);
            const double ch = 0.5 * (1.0 + e), sh = 0.5 * (1.0 - e);
            p.c = ch;
            p.s = sh / k;
            p.cp = k * sh;
            p.sp = ch;
            p.log_scale = kh;
            return p;
        }
        const double ch = std::cosh(kh), sh = std::sinh(kh);
        p.c = ch;
        p.s = sh / k;
        p.cp = k * sh;
        p.sp = ch;
        return p;
    }
    // Complex branch: cosh and sinh(kh)/k are even in k, so the sqrt branch is irrelevant.
    const cplx k = std::sqrt(z);
    const cplx kh = k * h;
    if (kh.real() > kOverflowGuardExponent) {
        const double g = kh.real();
        const cplx phase = std::exp(cplx(0.0, kh.imag()));
        const cplx decay = std::exp(-kh - g);
        const cplx ch = 0.5 * (phase + decay), sh = 0.5 * (phase - decay);
        p.c = ch;
        p.s = sh / k;
        p.cp = k * sh;
        p.sp = ch;
        p.log_scale = g;
        return p;
    }
    const cplx ch = std::cosh(kh), sh = std::sinh(kh);
    p.c = ch;
    p.s = sh / k;
    p.cp = k * sh;
    p.sp = ch;
    return p;
}

/// Propagator of the whole edge from 0 to x (0 <= x <= L).
inline Propagator propagate_to(const Edge& edge, cplx mu, double x) {
    Propagator total;
    const auto& pot = edge.potential;
    double start = 0.0;
    for (std::size_t k = 0; k < pot.values.size() && start < x; ++k) {
        const double end = k < pot.breakpoints.size() ? pot.breakpoints[k] : edge.length;
        const double stop = std::min(end, x);
        if (stop > start)
            total.prepend(piece_propagator(pot.values[k], mu, stop - start));
        start = end;
    }
    return total;
}

/// Integrals over [0, h] of C^2, C S, S^2 for the fundamental pair of a constant
/// piece at real spectral parameter (z = q - lambda).
inline std::array<double, 3> piece_moments(double z, double h) {
    if (std::abs(z) * h * h < 1e-6) {
        const double h2 = h * h, h3 = h2 * h;
        return {h + z * h3 / 3.0, h2 / 2.0 + z * h2 * h2 / 6.0, h3 / 3.0 + z * h3 * h2 / 15.0};
    }
    if (z < 0.0) {
        const double w = std::sqrt(-z);
        const double s2 = std::sin(2.0 * w * h) / (4.0 * w);
        const double sn = std::sin(w * h);
        return {h / 2.0 + s2, sn * sn / (2.0 * w * w), (h / 2.0 - s2) / (w * w)};
    }
    const double k = std::sqrt(z);
    if (k * h > 300.0)
        throw NumericalError("edge moment integrals overflow");
    const double s2 = std::sinh(2.0 * k * h) / (4.0 * k);
    const double sh = std::sinh(k * h);
    return {h / 2.0 + s2, sh * sh / (2.0 * k * k), (s2 - h / 2.0) / (k * k)};
}

} // namespace detail

/// Fundamental system at x = L for spectral parameter `mu`.
inline FundamentalData fundamental_system(const Edge& edge, cplx mu) {
    const auto p = detail::propagate_to(edge, mu, edge.length);
    return FundamentalData{mu, p.c, p.cp, p.s, p.sp, p.log_scale};
}

/// Value and derivative at x of a c + b s.
inline std::pair<cplx, cplx> evaluate_on_edge(const Edge& edge, cplx mu, cplx a, cplx b,
                                               double x) {
    if (!(x >= 0.0) || x > edge.length)
        throw GraphError(GraphError::Kind::IndexOutOfRange, "evaluation point outside the edge");
    const auto p = detail::propagate_to(edge, mu, x);
    const double f = p.log_scale == 0.0 ? 1.0 : std::exp(p.log_scale);
    return {(a * p.c + b * p.s) * f, (a * p.cp + b * p.sp) * f};
}

/// Real symmetric 2x2 Gram matrix of (c, s) in L^2(0, L) at real `lambda`,
/// returned as {<c,c>, <c,s>, <s,s>}.
inline std::array<double, 3> fundamental_gram(const Edge& edge, double lambda) {
    std::array<double, 3> gram{0.0, 0.0, 0.0};
    detail::Propagator at_start;
    const auto& pot = edge.potential;
    double start = 0.0;
    for (std::size_t k = 0; k < pot.values.size(); ++k) {
        const double end = k < pot.breakpoints.size() ? pot.breakpoints[k] : edge.length;
        const double h = end - start;
        const auto m = detail::piece_moments(pot.values[k] - lambda, h);
        // [c s](start + t) = [C(t) S(t)] * [[c, s], [c', s']](start)
        const double f = at_start.log_scale == 0.0 ? 1.0 : std::exp(at_start.log_scale);
        const double c0 = at_start.c.real() * f, s0 = at_start.s.real() * f;
        const double cp0 = at_start.cp.real() * f, sp0 = at_start.sp.real() * f;
        gram[0] += c0 * c0 * m[0] + 2.0 * c0 * cp0 * m[1] + cp0 * cp0 * m[2];
        gram[1] += c0 * s0 * m[0] + (c0 * sp0 + cp0 * s0) * m[1] + cp0 * sp0 * m[2];
        gram[2] += s0 * s0 * m[0] + 2.0 * s0 * sp0 * m[1] + sp0 * sp0 * m[2];
        at_start.prepend(detail::piece_propagator(pot.values[k], cplx(lambda, 0.0), h));
        start = end;
    }
    return gram;
}

/// True iff s(L; lambda) vanishes, i.e. lambda is a Dirichlet eigenvalue of the edge.
inline bool is_dirichlet_eigenvalue(const Edge& edge, double lambda, double tol = 1e-9) {
    const auto fd = fundamental_system(edge, cplx(lambda, 0.0));
    if (fd.log_scale > 0.0)
        return false;
    const double scale = std::max(1.0, std::abs(fd.sp_end) * edge.length);
    return std::abs(fd.s_end) < tol * scale;
}

/// Dirichlet eigenvalues of the edge inside [lo, hi], ascending.
inline std::vector<double> dirichlet_spectrum(const Edge& edge, double lo, double hi) {
    if (!(lo < hi))
        throw Error("dirichlet_spectrum: empty window");
    const auto dirichlet_fn = [&](double lambda) {
        return fundamental_system(edge, cplx(lambda, 0.0)).s_end.real();
    };
    const double unit = (M_PI / edge.length) * (M_PI / edge.length);
    const double step = std::min(0.05 * unit, (hi - lo) / 64.0);
    const auto n = static_cast<long>(std::ceil((hi - lo) / step));
    std::vector<double> roots;
    const auto push = [&](double r) {
        if (roots.empty() || std::abs(r - roots.back()) > 1e-9 * std::max(1.0, std::abs(r)))
            roots.push_back(r);
    };
    double a = lo, fa = dirichlet_fn(lo);
    for (long i = 1; i <= n; ++i) {
        const double b = i == n ? hi : lo + static_cast<double>(i) * step;
        const double fb = dirichlet_fn(b);
        if (fa == 0.0) {
            push(a);
        } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            double l = a, r = b, fl = fa;
            while (r - l > 1e-13 * std::max(1.0, std::abs(l))) {
                const double m = 0.5 * (l + r);
                const double fm = dirichlet_fn(m);
                if (fm == 0.0) {
                    l = r = m;
                    break;
                }
                if ((fm < 0.0) == (fl < 0.0)) {
                    l = m;
                    fl = fm;
                } else {
                    r = m;
                }
            }
            push(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    if (fa == 0.0)
        push(a);
    return roots;
}

} // namespace qgraph
