#include "nlsgraph/length_functions.hpp"

#include "nlsgraph/errors.hpp"
#include "nlsgraph/quadrature.hpp"
#include "quad_internal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace nlsgraph {

namespace {

constexpr double kClip = 1e-7;        // domain clipping at z in {0, 1, apex}
constexpr double kDeepClip = 1e-13;   // extension of the z -> 0 tail
constexpr double kRootDedup = 1e-8;

void check_increasing_domain(const Nonlinearity& nl, double theta, double z) {
    if (theta < 0.0)
        throw std::domain_error("length_increasing: theta must be >= 0");
    if (theta == 0.0) {
        if (!(z > 0.0 && z < 1.0))
            throw std::domain_error("length_increasing: z outside (0,1) for theta = 0");
    } else if (!(z > 0.0 && z < nl.apex)) {
        throw std::domain_error("length_increasing: z outside (0, apex)");
    }
}

void check_decreasing_domain(const Nonlinearity& nl, double theta, double z) {
    if (!(theta > -1.0 && theta <= 0.0))
        throw std::domain_error("length_decreasing: theta must lie in (-1, 0]");
    if (theta == 0.0) {
        if (!(z > 1.0 && z < nl.apex))
            throw std::domain_error("length_decreasing: z outside (1, apex) for theta = 0");
    } else if (!(z > 0.0 && z < nl.apex)) {
        throw std::domain_error("length_decreasing: z outside (0, apex)");
    }
}

// f(t) - (1-theta^2) f(z) through the stable difference; the arc
// endpoints must be roots of exactly this expression or the integrand
// sees a misplaced singularity (the plain inverse branches lose the
// endpoint entirely when z ~ 1 and theta ~ 0).
double level_gap(const Nonlinearity& nl, double z, double theta2, double t) {
    return potential_difference(nl, t, z) + theta2 * potential(nl, z);
}

double bisect_gap(const Nonlinearity& nl, double z, double theta2, double lo, double hi,
                  double glo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= 4.0 * 2.22e-16 * std::max(std::abs(mid), 1e-300)) break;
        const double gm = level_gap(nl, z, theta2, mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// First root of f(t) = (1-theta^2) f(z) at or above max(z, 1).
double arc_upper_endpoint(const Nonlinearity& nl, double z, double theta2) {
    double lo = std::max(z, 1.0);
    double glo = level_gap(nl, z, theta2, lo);
    if (glo <= 0.0) return lo;
    double hi = std::max(nl.apex, lo);
    while (level_gap(nl, z, theta2, hi) > 0.0) hi *= 2.0;
    return bisect_gap(nl, z, theta2, lo, hi, glo);
}

// Root of f(t) = (1-theta^2) f(z) below min(z, 1).
double arc_lower_endpoint(const Nonlinearity& nl, double z, double theta2) {
    const double hi = std::min(z, 1.0);
    const double glo = level_gap(nl, z, theta2, 0.0); // -(1-theta^2) f(z) < 0
    return bisect_gap(nl, z, theta2, 0.0, hi, glo);
}

} // namespace

double length_increasing(const Nonlinearity& nl, double theta, double z, double tol) {
    check_increasing_domain(nl, theta, z);
    const double theta2 = theta * theta;
    const double upper = arc_upper_endpoint(nl, z, theta2);
    if (!(upper > z)) throw SolverError("length_increasing: degenerate arc");
    return arc_length(nl, z, upper, ArcLevel{z, 1.0 - theta2}, tol);
}

double length_decreasing(const Nonlinearity& nl, double theta, double z, double tol) {
    check_decreasing_domain(nl, theta, z);
    const double theta2 = theta * theta;
    const double lower = arc_lower_endpoint(nl, z, theta2);
    if (!(lower < z)) throw SolverError("length_decreasing: degenerate arc");
    return arc_length(nl, lower, z, ArcLevel{z, 1.0 - theta2}, tol);
}

double regularized_derivative_sign(const Nonlinearity& nl, double theta, double z,
                                   Branch branch) {
    if (branch == Branch::increasing)
        check_increasing_domain(nl, theta, z);
    else
        check_decreasing_domain(nl, theta, z);

    const double one_minus_t2 = 1.0 - theta * theta;
    const double fz = potential(nl, z);
    const double first =
        theta * (nl.fmax - 2.0 * one_minus_t2 * coeff_a(nl, z) * fz) / std::sqrt(fz);

    double lo, hi;
    if (branch == Branch::increasing) {
        lo = z;
        hi = arc_upper_endpoint(nl, z, theta * theta);
    } else {
        lo = arc_lower_endpoint(nl, z, theta * theta);
        hi = z;
    }
    // Integrand g/f'^4 * sqrt(f - C): continuous through t = 1 (series
    // patch) and vanishing like sqrt at the arc ends; plain adaptive rule.
    auto integrand = [&](double t) {
        double gap = potential_difference(nl, t, z) + theta * theta * fz;
        if (gap < 0.0) gap = 0.0;
        return coeff_g_over_fp4(nl, t) * std::sqrt(gap);
    };
    detail::EvalCounter evals;
    const QuadratureResult r = detail::adaptive_gk(integrand, lo, hi, 1e-11, evals);
    return first - one_minus_t2 * potential_derivative(nl, z, 1) * r.value;
}

double threshold_length_center(const Nonlinearity& nl) {
    return 3.141592653589793238462643383279503 / std::sqrt(nl.p - 2.0);
}

double threshold_length_decreasing(const Nonlinearity& nl, double theta) {
    (void)nl;
    if (!(theta > -1.0 && theta < 0.0))
        throw std::domain_error("threshold_length_decreasing: theta must lie in (-1, 0)");
    const double a = std::abs(theta);
    return std::asinh(a / std::sqrt(1.0 - theta * theta));
}

namespace {

struct BranchDomain {
    double lo, hi;
    bool deep_low_tail; // domain touches z = 0: extend the grid below kClip
};

BranchDomain branch_domain(const Nonlinearity& nl, double theta, Branch branch) {
    if (branch == Branch::increasing) {
        if (theta < 0.0) throw std::domain_error("solve_length: increasing branch needs theta >= 0");
        if (theta == 0.0) return {kClip, 1.0 - kClip, true};
        return {kClip, nl.apex - kClip, true};
    }
    if (!(theta > -1.0 && theta <= 0.0))
        throw std::domain_error("solve_length: decreasing branch needs theta in (-1, 0]");
    if (theta == 0.0) return {1.0 + kClip, nl.apex - kClip, false};
    return {kClip, nl.apex - kClip, true};
}

} // namespace

RootSet solve_length(const LengthQuery& query) {
    const Nonlinearity& nl = query.nl;
    if (!(query.ell > 0.0)) throw std::invalid_argument("solve_length: ell must be positive");
    const int n = std::max(query.grid_size, 16);
    const BranchDomain dom = branch_domain(nl, query.theta, query.branch);

    std::vector<double> grid;
    grid.reserve(n + 64);
    const double h = (dom.hi - dom.lo) / (n - 1);
    for (int i = 0; i < n; ++i) grid.push_back(dom.lo + h * i);
    // Geometric refinement toward both endpoints: L varies fastest there.
    for (int k = 1; k <= 20; ++k) {
        const double step = h * std::pow(0.5, k);
        grid.push_back(dom.lo + step);
        grid.push_back(dom.hi - step);
    }
    if (dom.deep_low_tail) {
        // L grows like |log z| toward z = 0, so halving z advances ell by a
        // constant: this tail brackets the large-ell roots that sit far
        // below the uniform grid's resolution.
        for (double z = dom.lo * 0.5; z > kDeepClip; z *= 0.5) grid.push_back(z);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto L = [&](double z) {
        return query.branch == Branch::increasing ? length_increasing(nl, query.theta, z, 1e-11)
                                                  : length_decreasing(nl, query.theta, z, 1e-11);
    };

    std::vector<double> values(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) values[i] = L(grid[i]) - query.ell;

    RootSet out;
    out.bracketing_grid_size = static_cast<int>(grid.size());
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        double a = grid[i], b = grid[i + 1];
        double fa = values[i], fb = values[i + 1];
        if (fa == 0.0) {
            out.roots.push_back(a);
            continue;
        }
        if (!(fa * fb < 0.0)) continue;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            // 1e-11 in z, tightened to relative for roots far below 1 where
            // L varies like |log z| and an absolute tolerance would leave
            // an O(1e-3) residual in L.
            if (b - a <= std::max(1e-11 * std::min(1.0, m), 8.0 * m * 2.22e-16)) break;
            const double fm = L(m) - query.ell;
            if (fm == 0.0) {
                a = b = m;
                break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        out.roots.push_back(0.5 * (a + b));
    }

    std::sort(out.roots.begin(), out.roots.end());
    // Merge duplicates (below quadrature noise, above bisection tolerance)
    // and drop grid artifacts that fail the residual check.
    std::vector<double> cleaned;
    for (double r : out.roots) {
        if (!cleaned.empty() && r - cleaned.back() < kRootDedup) continue;
        if (std::abs(L(r) - query.ell) < 1e-8 * std::max(1.0, query.ell)) cleaned.push_back(r);
    }
    out.roots = std::move(cleaned);
    out.multiplicity_flag = out.roots.size() > 1;
    return out;
}

MonotonicityVerdict monotonicity_scan(const Nonlinearity& nl, double theta, Branch branch,
                                      double lo, double hi, int n) {
    if (!(lo < hi) || n < 3) throw std::invalid_argument("monotonicity_scan: bad interval/grid");
    auto L = [&](double z) {
        return branch == Branch::increasing ? length_increasing(nl, theta, z, 1e-11)
                                            : length_decreasing(nl, theta, z, 1e-11);
    };
    std::vector<double> zs(n), vs(n);
    for (int i = 0; i < n; ++i) {
        zs[i] = lo + (hi - lo) * i / (n - 1);
        vs[i] = L(zs[i]);
    }
    constexpr double tol = 1e-10;
    bool any_up = false, any_down = false;
    std::vector<int> turns; // index i where the difference sign flips at i
    int last_sign = 0;
    for (int i = 0; i + 1 < n; ++i) {
        const double d = vs[i + 1] - vs[i];
        if (std::abs(d) <= tol) continue;
        const int s = d > 0.0 ? 1 : -1;
        if (s > 0) any_up = true;
        if (s < 0) any_down = true;
        if (last_sign != 0 && s != last_sign) turns.push_back(i);
        last_sign = s;
    }
    MonotonicityVerdict v{};
    if (any_up && any_down) {
        v.kind = MonotonicityVerdict::Kind::non_monotone;
        const int first = turns.front();
        const int last = turns.back();
        v.fold_lo = zs[std::max(0, first - 1)];
        v.fold_hi = zs[std::min(n - 1, last + 1)];
        // L values attained at the turning points: local minima floor the
        // window, local maxima cap it.
        double ell_lo = -HUGE_VAL, ell_hi = HUGE_VAL;
        for (int i : turns) {
            const bool is_min = vs[i + 1] > vs[i];
            if (is_min)
                ell_lo = std::max(ell_lo, vs[i]);
            else
                ell_hi = std::min(ell_hi, vs[i]);
        }
        v.fold_ell_lo = ell_lo;
        v.fold_ell_hi = ell_hi;
        return v;
    }
    v.kind = any_down ? MonotonicityVerdict::Kind::strictly_decreasing
                      : MonotonicityVerdict::Kind::strictly_increasing;
    return v;
}

double arc_length_from_rest(const Nonlinearity& nl, double w, double z, double tol) {
    if (!(w > 0.0 && w < z)) throw std::domain_error("arc_length_from_rest: need 0 < w < z");
    return arc_length(nl, w, z, ArcLevel{w, 1.0}, tol);
}

} // namespace nlsgraph
