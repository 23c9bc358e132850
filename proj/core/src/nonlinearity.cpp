#include "nlsgraph/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nlsgraph {

namespace {

// Safeguarded bisection-then-Newton on a bracketed monotone function.
// f' vanishes at the bracket edges of both inverse branches, so Newton
// alone can escape; every step is projected back into the bracket.
template <typename F, typename DF>
double bracketed_root(F fn, DF dfn, double lo, double hi) {
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double fx = fn(x);
        if (fx == 0.0) return x;
        if ((fx < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        double width = hi - lo;
        if (width <= 1e-15 * std::max(std::abs(lo) + std::abs(hi), 1e-300)) break;
        double d = dfn(x);
        double xn = (d != 0.0) ? x - fx / d : lo;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    return x;
}

} // namespace

Nonlinearity::Nonlinearity(double exponent) : p(exponent) {
    if (!(p > 2.0) || !(p <= 10.0))
        throw std::invalid_argument("Nonlinearity: exponent must lie in (2, 10], got " +
                                    std::to_string(exponent));
    apex = std::pow(p / 2.0, 1.0 / (p - 2.0));
    fmax = (p - 2.0) / (2.0 * p);
    inflection = std::pow(1.0 / (p - 1.0), 1.0 / (p - 2.0));
    // The stored apex is the true root of f only up to rounding; evaluate
    // the residual in extended precision so potential() can subtract it.
    const long double a = apex;
    const long double pl = p;
    apex_potential = static_cast<double>(a * a / 2.0L - std::pow(a, pl) / pl);
}

namespace {

// f(t) - f(z) for 0 < z, |t-z| small relative to z: the quadratic and
// power parts are differenced separately so nothing of order f itself
// cancels. Error is O(eps * |t-z|).
double potential_diff_stable(double p, double t, double z) {
    const double dt = t - z;
    const double quad = 0.5 * dt * (t + z);
    const double pw = std::pow(z, p) * std::expm1(p * std::log1p(dt / z)) / p;
    return quad - pw;
}

} // namespace

double potential(const Nonlinearity& nl, double x) {
    const double a = std::abs(x);
    // Near the apex f itself vanishes and the plain form loses all digits;
    // difference against the apex instead.
    if (std::abs(a - nl.apex) < 0.25 * nl.apex)
        return potential_diff_stable(nl.p, a, nl.apex) + nl.apex_potential;
    return 0.5 * a * a - std::pow(a, nl.p) / nl.p;
}

double potential_difference(const Nonlinearity& nl, double t, double zref) {
    if (zref <= 0.0) return potential(nl, t);
    if (t <= 0.0) return -potential(nl, zref);
    if (std::abs(t - zref) <= 0.125 * zref) return potential_diff_stable(nl.p, t, zref);
    return potential(nl, t) - potential(nl, zref);
}

double potential_derivative(const Nonlinearity& nl, double x, int order) {
    const double p = nl.p;
    const double a = std::abs(x);
    switch (order) {
    case 1:
        return x - std::pow(a, p - 2.0) * x;
    case 2:
        return 1.0 - (p - 1.0) * std::pow(a, p - 2.0);
    case 3: {
        double s = (x >= 0.0) ? 1.0 : -1.0;
        return -(p - 1.0) * (p - 2.0) * std::pow(a, p - 3.0) * s;
    }
    default:
        throw std::invalid_argument("potential_derivative: order must be 1, 2 or 3");
    }
}

double hamiltonian(const Nonlinearity& nl, const PhasePoint& pt) {
    return -0.5 * pt.slope * pt.slope + potential(nl, pt.u);
}

double potential_inverse_low(const Nonlinearity& nl, double c) {
    if (!(c >= 0.0) || !(c <= nl.fmax))
        throw std::domain_error("potential_inverse_low: level outside [0, f(1)]");
    if (c == 0.0) return 0.0;
    auto fn = [&](double t) { return potential(nl, t) - c; };
    auto dfn = [&](double t) { return potential_derivative(nl, t, 1); };
    return bracketed_root(fn, dfn, 0.0, 1.0);
}

double potential_inverse_high(const Nonlinearity& nl, double c) {
    if (!(c <= nl.fmax))
        throw std::domain_error("potential_inverse_high: level above f(1)");
    double hi = nl.apex;
    if (c < 0.0) {
        while (potential(nl, hi) > c) hi *= 2.0;
    }
    auto fn = [&](double t) { return potential(nl, t) - c; };
    auto dfn = [&](double t) { return potential_derivative(nl, t, 1); };
    return bracketed_root(fn, dfn, 1.0, hi);
}

double soliton(const Nonlinearity& nl, double x) {
    const double a = 0.5 * (nl.p - 2.0) * x;
    // sech^(2/(p-2)); evaluate through exp to stay finite for large |x|
    const double sech = 1.0 / std::cosh(a);
    return nl.apex * std::pow(sech, 2.0 / (nl.p - 2.0));
}

double soliton_slope(const Nonlinearity& nl, double x) {
    // phi'(x) = -phi(x) * tanh((p-2)x/2)
    return -soliton(nl, x) * std::tanh(0.5 * (nl.p - 2.0) * x);
}

double soliton_inverse(const Nonlinearity& nl, double z) {
    if (!(z > 0.0) || !(z <= nl.apex))
        throw std::domain_error("soliton_inverse: amplitude outside (0, apex]");
    // sech((p-2)y/2) = (z/apex)^{(p-2)/2}; arcsech(w) = arccosh(1/w)
    const double w = std::pow(z / nl.apex, 0.5 * (nl.p - 2.0));
    if (w >= 1.0) return 0.0;
    return 2.0 / (nl.p - 2.0) * std::acosh(1.0 / w);
}

double coeff_a(const Nonlinearity& nl, double t) {
    if (!(t > 0.0)) throw std::domain_error("coeff_a: t must be positive");
    const double s = t - 1.0;
    if (std::abs(s) < 1e-4) {
        // Second-order series through the 0/0 point at t = 1.
        return (nl.p - 1.0) * s * (-1.0 / 6.0 + 0.25 * s);
    }
    const double df = potential(nl, t) - nl.fmax;
    const double f1 = potential_derivative(nl, t, 1);
    const double f2 = potential_derivative(nl, t, 2);
    return 0.5 - df * f2 / (f1 * f1);
}

double coeff_g(const Nonlinearity& nl, double t) {
    if (!(t > 0.0)) throw std::domain_error("coeff_g: t must be positive");
    if (std::abs(t - 1.0) <= 1e-9)
        throw std::domain_error("coeff_g: degenerate point t = 1 (g(1) = 0)");
    const double df = potential(nl, t) - nl.fmax;
    const double f1 = potential_derivative(nl, t, 1);
    const double f2 = potential_derivative(nl, t, 2);
    const double f3 = potential_derivative(nl, t, 3);
    return -3.0 * f2 * f1 * f1 + 6.0 * df * f2 * f2 - 2.0 * df * f3 * f1;
}

double coeff_g_over_fp4(const Nonlinearity& nl, double t) {
    const double s = t - 1.0;
    if (std::abs(s) < 1e-3) {
        // g ~ s^4 and f'^4 ~ s^4 cancel catastrophically; use the series
        // q(1+s) = q0 + q1 s with
        //   q0 = -(p+2)(p-1) / (6(p-2)),
        //   q1 = (p-1)(p^2+23p+12) / (30(p-2)).
        const double p = nl.p;
        const double q0 = -(p + 2.0) * (p - 1.0) / (6.0 * (p - 2.0));
        const double q1 = (p - 1.0) * (p * p + 23.0 * p + 12.0) / (30.0 * (p - 2.0));
        return q0 + q1 * s;
    }
    const double f1 = potential_derivative(nl, t, 1);
    const double f12 = f1 * f1;
    return coeff_g(nl, t) / (f12 * f12);
}

double certificate_psi(const Nonlinearity& nl, double z, double x, double theta) {
    const double fx = potential_derivative(nl, x, 1);
    const double fz = potential_derivative(nl, z, 1);
    const double fxx = potential_derivative(nl, x, 2);
    return -fx * fx + (1.0 - theta * theta) * fz * (fx + (z - x) * fxx);
}

double certificate_h(const Nonlinearity& nl, double x, double theta) {
    const double p = nl.p;
    const double t2 = theta * theta;
    return -2.0 + (p - 1.0) * (4.0 - (p - 2.0) * (t2 - 3.0)) * x +
           (p - 1.0) * (-2.0 * (p - 1.0) + (p - 2.0) * (t2 - 3.0)) * x * x;
}

} // namespace nlsgraph
