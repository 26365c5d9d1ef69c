#pragma once

#include <cmath>
#include <vector>

namespace qgraph {

/// Piecewise-constant real potential on an edge [0, L].
///
/// `values[k]` is the constant on the k-th piece; piece k spans
/// [breakpoints[k-1], breakpoints[k]] with the implicit ends 0 and L.
struct PotentialSpec {
    std::vector<double> breakpoints;
    std::vector<double> values{0.0};

    static PotentialSpec constant(double q) { return PotentialSpec{{}, {q}}; }

    bool is_constant() const noexcept { return breakpoints.empty(); }

    /// Checks the structural invariants against an edge of length `length`.
    bool valid_for(double length) const noexcept {
        if (values.size() != breakpoints.size() + 1)
            return false;
        for (double v : values)
            if (!std::isfinite(v))
                return false;
        double prev = 0.0;
        for (double b : breakpoints) {
            if (!(b > prev) || !(b < length))
                return false;
            prev = b;
        }
        return true;
    }

    bool operator==(const PotentialSpec&) const = default;
};

} // namespace qgraph
