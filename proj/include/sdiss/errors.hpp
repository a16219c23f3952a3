#pragma once

#include <stdexcept>
#include <string>

namespace sdiss {

// Input outside the domain of a map or operation (non-finite point, x outside I, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Invalid parameters or violated preconditions.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotInvertibleError : ParameterError {
    using ParameterError::ParameterError;
};

// A numerical procedure failed (escape, divergence, lost graph condition, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Planar-geometry inconsistency (crossing arcs, cycles in the quotient graph, ...).
struct GeometryError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace sdiss
