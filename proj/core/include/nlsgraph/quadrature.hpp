#pragma once

#include "nlsgraph/nonlinearity.hpp"

namespace nlsgraph {

enum class SingularAt { lower, upper, both, none };

// Integral of t^m / sqrt(f(t) - level) over [lower, upper]. The integrand
// has inverse-square-root singularities exactly where f crosses the level;
// flagged endpoints are removed by the substitution t = endpoint -/+ s^2
// (or a double-exponential transform when f' also vanishes there).
struct SingularIntegralSpec {
    Nonlinearity nl;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.0;
    int moment = 0;
    SingularAt singular_at = SingularAt::none;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

// tol must lie in [1e-13, 1e-4]. Throws std::invalid_argument on a bad
// spec (empty interval, endpoint not on the level when flagged),
// SingularInteriorError when f - level vanishes inside the interval, and
// ConvergenceError when the evaluation budget runs out.
QuadratureResult integrate_singular(const SingularIntegralSpec& spec, double tol);

// Hamiltonian level expressed as C = factor * f(zref). Keeping the level
// in this form lets the integrand evaluate f(t) - C through the stable
// difference f(t) - f(zref): the plain subtraction loses every digit when
// t, zref sit next to the maximum of f (the z -> 1, theta -> 0 regime).
struct ArcLevel {
    double zref = 0.0;
    double factor = 1.0;

    double value(const Nonlinearity& nl) const { return factor * potential(nl, zref); }
};

// (1/sqrt(2)) * integral dt / sqrt(f(t) - level) over [lo, hi], i.e. the
// edge length of the monotone arc traversing [lo, hi] at the given
// Hamiltonian level. Singular endpoints are detected automatically.
// An empty arc (lo == hi) has length 0.
double arc_length(const Nonlinearity& nl, double lo, double hi, ArcLevel level,
                  double tol = 1e-12);
double arc_length(const Nonlinearity& nl, double lo, double hi, double level,
                  double tol = 1e-12);

// (1/sqrt(2)) * integral t^p / sqrt(f(t) - level) dt over [z_lo, z_hi]:
// the L^p norm (to the p-th power) of the monotone solution piece
// traversing that arc.
double arc_norm_p(const Nonlinearity& nl, double z_lo, double z_hi, ArcLevel level,
                  double tol = 1e-12);
double arc_norm_p(const Nonlinearity& nl, double z_lo, double z_hi, double level,
                  double tol = 1e-12);

// Same with moment q instead of p (used for L^2 tails of soliton pieces).
double arc_moment(const Nonlinearity& nl, double lo, double hi, ArcLevel level,
                  int moment, double tol = 1e-12);
double arc_moment(const Nonlinearity& nl, double lo, double hi, double level,
                  int moment, double tol = 1e-12);

} // namespace nlsgraph
