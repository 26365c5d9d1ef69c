#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qgraph {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural problems with a metric graph.
class GraphError : public Error {
public:
    enum class Kind {
        NonPositiveLength,
        DanglingVertexIndex,
        DisconnectedGraph,
        InvalidPotential,
        InvalidVertexConditions,
        InvalidVertexSet,
        IndexOutOfRange,
    };

    GraphError(Kind kind, std::string what,
               std::vector<std::vector<int>> components = {})
        : Error(std::move(what)), kind_(kind), components_(std::move(components)) {}

    Kind kind() const noexcept { return kind_; }

    /// Vertex partition; only filled for DisconnectedGraph.
    const std::vector<std::vector<int>>& components() const noexcept { return components_; }

private:
    Kind kind_;
    std::vector<std::vector<int>> components_;
};

/// Base for failures of the numerical pipeline (CLI exit status 3).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The requested point is not an eigenvalue (no singular value below threshold).
class NotAnEigenvalue : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The vertex boundary value problem is not uniquely solvable at this point.
class AtEigenvalue : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A basis vector does not define a function continuous at the vertices.
class ContinuityViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Residue probes lost too many digits in the secular solves.
class ProbeIllConditioned : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A theorem check was requested on data that violates its hypothesis.
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

} // namespace qgraph
