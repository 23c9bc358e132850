#pragma once

#include "nlsgraph/nonlinearity.hpp"

#include <vector>

namespace nlsgraph {

enum class Branch { increasing, decreasing };

struct LengthQuery {
    Nonlinearity nl;
    double theta = 0.0;
    Branch branch = Branch::increasing;
    double ell = 0.0;     // target edge length, > 0
    int grid_size = 400;  // bracketing grid for solve_length
};

struct RootSet {
    std::vector<double> roots; // strictly increasing z values in (0, apex)
    bool multiplicity_flag = false;
    int bracketing_grid_size = 0;
};

// Length of the increasing arc started at (z, theta*sqrt(2 f(z))):
// (1/sqrt2) * integral from z to f2^{-1}((1-theta^2) f(z)) of
// dt / sqrt(f(t) - (1-theta^2) f(z)).
// Domain: theta > 0 and z in (0, apex), or theta = 0 and z in (0, 1).
double length_increasing(const Nonlinearity& nl, double theta, double z,
                         double tol = 1e-12);

// Length of the decreasing arc; lower endpoint f1^{-1}((1-theta^2) f(z)).
// Domain: theta in (-1, 0) and z in (0, apex), or theta = 0 and z in (1, apex).
double length_decreasing(const Nonlinearity& nl, double theta, double z,
                         double tol = 1e-12);

// H(z, theta) = sqrt(2) L'(z) ((1-theta^2) f(z) - f(1)), evaluated through
// the non-singular form built on coeff_a / coeff_g. The sign of L' is
// sign(H) / sign((1-theta^2) f(z) - f(1)).
double regularized_derivative_sign(const Nonlinearity& nl, double theta, double z,
                                   Branch branch);

// pi / sqrt(p-2): the limit of both length functions as z -> 1 at theta=0.
double threshold_length_center(const Nonlinearity& nl);

// asinh(|theta| / sqrt(1-theta^2)): the limit of the decreasing length as
// z -> 0 for theta in (-1, 0). The absolute value fixes the sign
// convention so the threshold is a positive length.
double threshold_length_decreasing(const Nonlinearity& nl, double theta);

// All z in the clipped branch domain with L(z) = ell, by sign-change
// bracketing on a geometric-plus-uniform grid refined by bisection.
// An empty RootSet is a valid answer ("no monotone solution").
RootSet solve_length(const LengthQuery& query);

struct MonotonicityVerdict {
    enum class Kind { strictly_decreasing, strictly_increasing, non_monotone } kind;
    // For non-monotone scans: a z-subinterval bracketing all detected
    // turning points of L, plus the corresponding window of L values
    // attained at the turning points (the fold window in ell).
    double fold_lo = 0.0;
    double fold_hi = 0.0;
    double fold_ell_lo = 0.0;
    double fold_ell_hi = 0.0;
};

MonotonicityVerdict monotonicity_scan(const Nonlinearity& nl, double theta, Branch branch,
                                      double lo, double hi, int n);

// Length of the arc that rests at amplitude w (u' = 0 there) and rises to
// amplitude z at level f(w); strictly decreasing in w for z below the
// inflection point of f.
double arc_length_from_rest(const Nonlinearity& nl, double w, double z,
                            double tol = 1e-12);

} // namespace nlsgraph
