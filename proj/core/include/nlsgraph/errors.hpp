#pragma once

#include <stdexcept>
#include <string>

namespace nlsgraph {

// Base class for recoverable numerical failures. Precondition violations
// use std::invalid_argument / std::domain_error directly.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// f - C vanishes at an interior sample point of an integration interval.
class SingularInteriorError : public SolverError {
public:
    using SolverError::SolverError;
};

// Quadrature could not reach the requested tolerance within its
// evaluation budget; carries the best available estimate.
class ConvergenceError : public SolverError {
public:
    ConvergenceError(const std::string& what, double best, double err)
        : SolverError(what), best_estimate(best), error_estimate(err) {}
    double best_estimate;
    double error_estimate;
};

// ODE integration aborted (blow-up or step underflow); last_x is the
// rightmost abscissa that was reached.
class IntegrationFailure : public SolverError {
public:
    IntegrationFailure(const std::string& what, double x)
        : SolverError(what), last_x(x) {}
    double last_x;
};

// A requested root/bound-state does not exist for the given parameters.
class NoRootError : public SolverError {
public:
    using SolverError::SolverError;
};

// Star graphs (P = L = 0): the incidence index is undefined and the
// classification machinery does not apply.
class UnsupportedTopologyError : public SolverError {
public:
    using SolverError::SolverError;
};

// The two independent action computations disagree beyond tolerance.
class InconsistentStateError : public SolverError {
public:
    using SolverError::SolverError;
};

// Candidate pool came out empty.
class NoCandidateError : public SolverError {
public:
    using SolverError::SolverError;
};

} // namespace nlsgraph
