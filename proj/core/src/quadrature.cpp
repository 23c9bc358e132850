#include "nlsgraph/quadrature.hpp"

#include "nlsgraph/errors.hpp"
#include "quad_internal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlsgraph {

namespace {

using detail::EvalCounter;

constexpr double kLevelMatchTol = 1e-9;

// f(base + tau) - f(base), formed from (base, tau) without ever rounding
// base + tau: this keeps full precision arbitrarily close to an arc
// endpoint, where the integrable singularity lives below one ulp of the
// coordinate.
double f_offset(const Nonlinearity& nl, double base, double tau) {
    if (base <= 0.0) return potential(nl, base + tau) - potential(nl, base);
    const double ratio = tau / base;
    if (ratio <= -1.0) return -potential(nl, base);
    const double arg = nl.p * std::log1p(ratio);
    if (arg > 700.0) return potential(nl, base + tau) - potential(nl, base);
    const double quad = tau * (base + 0.5 * tau);
    return quad - std::pow(base, nl.p) * std::expm1(arg) / nl.p;
}

// f(t) - C with C either a plain double or factor * f(zref) (the latter
// evaluated through the cancellation-free potential difference).
struct Integrand {
    const Nonlinearity& nl;
    double zref;        // < 0 means plain level
    double factor;
    double plain_level;
    double moment;

    double gap(double t) const {
        if (zref < 0.0) return potential(nl, t) - plain_level;
        return potential_difference(nl, t, zref) + (1.0 - factor) * potential(nl, zref);
    }

    double weight(double t) const {
        return moment == 0.0 ? 1.0 : std::pow(t, moment);
    }
};

// Tanh-sinh rule over [a, b] with the integrand given gap values relative
// to the singular endpoint e. Abscissas are carried as distances to the
// nearer endpoint so the exponential clustering is not flattened by
// rounding; skipping those nodes instead would lose sqrt(ulp)-scale mass
// of the inverse-square-root singularity.
QuadratureResult de_one_sided(const Integrand& integrand, double a, double b,
                              bool singular_lower, double tol, EvalCounter& evals) {
    const double e = singular_lower ? a : b;
    const double far = singular_lower ? b : a;
    const double shift = integrand.gap(far) - integrand.gap(e);
    const double r = 0.5 * (b - a);
    const double c = 0.5 * (a + b);
    const double pi_half = 1.5707963267948966;

    auto value_at = [&](double x, double dist_near, bool near_singular) {
        double v;
        if (near_singular)
            v = f_offset(integrand.nl, e, singular_lower ? dist_near : -dist_near);
        else
            v = f_offset(integrand.nl, far, singular_lower ? -dist_near : dist_near) + shift;
        if (v < 1e-300) v = 1e-300;
        return integrand.weight(x) / std::sqrt(v);
    };

    double prev = 0.0;
    double value = 0.0;
    double err = HUGE_VAL;
    double h = 0.5;
    for (int level = 0; level < 11; ++level, h *= 0.5) {
        double sum = 0.0;
        const long kmax = static_cast<long>(std::ceil(4.0 / h));
        for (long k = -kmax; k <= kmax; ++k) {
            const double u = k * h;
            const double y = pi_half * std::sinh(u);
            const double w = pi_half * std::cosh(u) / (std::cosh(y) * std::cosh(y));
            if (w < 1e-300) continue;
            const double d = r * (2.0 / (std::exp(2.0 * std::abs(y)) + 1.0));
            if (d <= 0.0) continue;
            evals.bump();
            if (k == 0) {
                sum += w * value_at(c, r, !singular_lower);
            } else {
                const bool lower_side = k < 0;
                const double x = lower_side ? a + d : b - d;
                const bool near_sing = lower_side == singular_lower;
                sum += w * value_at(x, d, near_sing);
            }
        }
        value = r * h * sum;
        evals.best = value;
        if (level >= 2) {
            err = std::abs(value - prev);
            if (err <= tol) break;
        }
        prev = value;
    }
    return {value, err, evals.count};
}

QuadratureResult one_sided(const Integrand& integrand, double a, double b, bool singular_lower,
                           double tol, EvalCounter& evals) {
    const double e = singular_lower ? a : b;
    // The endpoint sits on the level only up to rounding; integrating the
    // gap relative to the endpoint (f(t) - f(e) instead of f(t) - C) pins
    // the turning point exactly there. The induced level shift is below
    // 1e-15 in effect on the arc length.
    const double fpe = std::abs(potential_derivative(integrand.nl, e, 1));
    // If f' (nearly) vanishes at the singular endpoint the zero of f - C
    // is (nearly) double and the s^2 substitution does not regularize it;
    // use the double-exponential transform there.
    if (fpe < 1e-6) return de_one_sided(integrand, a, b, singular_lower, tol, evals);
    auto substituted = [&](double s) {
        const double tau = singular_lower ? s * s : -(s * s);
        double v = f_offset(integrand.nl, e, tau);
        if (v < 1e-300) v = 1e-300;
        const double t = e + tau;
        return 2.0 * s * integrand.weight(t) / std::sqrt(v);
    };
    return detail::adaptive_gk(substituted, 0.0, std::sqrt(b - a), tol, evals);
}

QuadratureResult integrate_core(const Integrand& integrand, double a, double b,
                                SingularAt singular_at, double tol) {
    EvalCounter evals;
    auto plain = [&](double lo, double hi, double t2) {
        auto fn = [&](double t) {
            double v = integrand.gap(t);
            if (v < 1e-300) v = 1e-300;
            return integrand.weight(t) / std::sqrt(v);
        };
        return detail::adaptive_gk(fn, lo, hi, t2, evals);
    };
    QuadratureResult r{};
    if (singular_at == SingularAt::none) {
        r = plain(a, b, tol);
    } else {
        // Split at the midpoint even when only one endpoint is flagged:
        // the substituted variable handles its own singular end but turns
        // a steep (merely near-singular) far endpoint into an
        // unresolvable boundary layer, while plain panels in t-space
        // resolve it cheaply.
        const double mid = 0.5 * (a + b);
        const bool lower_sing =
            singular_at == SingularAt::lower || singular_at == SingularAt::both;
        const bool upper_sing =
            singular_at == SingularAt::upper || singular_at == SingularAt::both;
        QuadratureResult left = lower_sing ? one_sided(integrand, a, mid, true, 0.5 * tol, evals)
                                           : plain(a, mid, 0.5 * tol);
        QuadratureResult right = upper_sing
                                     ? one_sided(integrand, mid, b, false, 0.5 * tol, evals)
                                     : plain(mid, b, 0.5 * tol);
        r = {left.value + right.value, left.error_estimate + right.error_estimate, 0};
    }
    r.evaluations = evals.count;
    return r;
}

void check_interior_positive(const Integrand& integrand, double a, double b) {
    for (int i = 0; i < 64; ++i) {
        const double t = a + (b - a) * (i + 0.5) / 64.0;
        if (!(integrand.gap(t) > 0.0))
            throw SingularInteriorError(
                "integrate_singular: f - level vanishes at an interior point");
    }
}

// An endpoint counts as singular when the turning point of the level
// (the zero of f - C) is within rounding distance of it. Solving
// |f'| d + |f''| d^2 / 2 = gap for the turning distance d covers both the
// generic endpoints and the near-degenerate ones where f' ~ 0.
bool endpoint_singular(const Integrand& integrand, double e, double span) {
    const double gap = integrand.gap(e);
    if (gap <= 0.0) return true; // at or past the turn (rounding residue)
    const double fp = std::abs(potential_derivative(integrand.nl, e, 1));
    const double fpp = std::max(std::abs(potential_derivative(integrand.nl, e, 2)), 1e-8);
    const double dist = 2.0 * gap / (fp + std::sqrt(fp * fp + 2.0 * fpp * gap));
    const double resolution = 2.22e-16 * std::max(std::abs(e), 1e-3 * span);
    return dist <= 256.0 * resolution;
}

SingularAt detect_singular(const Integrand& integrand, double lo, double hi) {
    const double span = hi - lo;
    const bool l = endpoint_singular(integrand, lo, span);
    const bool u = endpoint_singular(integrand, hi, span);
    if (l && u) return SingularAt::both;
    if (l) return SingularAt::lower;
    if (u) return SingularAt::upper;
    return SingularAt::none;
}

double arc_common(double lo, double hi, const Integrand& integrand, double tol) {
    if (lo == hi) return 0.0;
    const double a = std::min(lo, hi);
    const double b = std::max(lo, hi);
    check_interior_positive(integrand, a, b);
    const QuadratureResult r =
        integrate_core(integrand, a, b, detect_singular(integrand, a, b), tol);
    return r.value / std::sqrt(2.0);
}

} // namespace

QuadratureResult integrate_singular(const SingularIntegralSpec& spec, double tol) {
    if (!(tol >= 1e-13 && tol <= 1e-4))
        throw std::invalid_argument("integrate_singular: tol outside [1e-13, 1e-4]");
    if (!(spec.lower < spec.upper))
        throw std::invalid_argument("integrate_singular: empty or reversed interval");
    if (spec.moment < 0)
        throw std::invalid_argument("integrate_singular: moment must be non-negative");

    const Integrand integrand{spec.nl, -1.0, 1.0, spec.level,
                              static_cast<double>(spec.moment)};
    const bool lower_flagged =
        spec.singular_at == SingularAt::lower || spec.singular_at == SingularAt::both;
    const bool upper_flagged =
        spec.singular_at == SingularAt::upper || spec.singular_at == SingularAt::both;
    if (lower_flagged && std::abs(integrand.gap(spec.lower)) >= kLevelMatchTol)
        throw std::invalid_argument(
            "integrate_singular: lower endpoint flagged singular but f != level");
    if (upper_flagged && std::abs(integrand.gap(spec.upper)) >= kLevelMatchTol)
        throw std::invalid_argument(
            "integrate_singular: upper endpoint flagged singular but f != level");

    check_interior_positive(integrand, spec.lower, spec.upper);
    return integrate_core(integrand, spec.lower, spec.upper, spec.singular_at, tol);
}

double arc_moment(const Nonlinearity& nl, double lo, double hi, ArcLevel level, int moment,
                  double tol) {
    const Integrand integrand{nl, level.zref, level.factor, 0.0, static_cast<double>(moment)};
    return arc_common(lo, hi, integrand, tol);
}

double arc_moment(const Nonlinearity& nl, double lo, double hi, double level, int moment,
                  double tol) {
    const Integrand integrand{nl, -1.0, 1.0, level, static_cast<double>(moment)};
    return arc_common(lo, hi, integrand, tol);
}

double arc_length(const Nonlinearity& nl, double lo, double hi, ArcLevel level, double tol) {
    return arc_moment(nl, lo, hi, level, 0, tol);
}

double arc_length(const Nonlinearity& nl, double lo, double hi, double level, double tol) {
    return arc_moment(nl, lo, hi, level, 0, tol);
}

double arc_norm_p(const Nonlinearity& nl, double z_lo, double z_hi, ArcLevel level, double tol) {
    const Integrand integrand{nl, level.zref, level.factor, 0.0, nl.p};
    return arc_common(z_lo, z_hi, integrand, tol);
}

double arc_norm_p(const Nonlinearity& nl, double z_lo, double z_hi, double level, double tol) {
    const Integrand integrand{nl, -1.0, 1.0, level, nl.p};
    return arc_common(z_lo, z_hi, integrand, tol);
}

} // namespace nlsgraph
