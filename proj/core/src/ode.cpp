#include "nlsgraph/ode.hpp"

#include "nlsgraph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlsgraph {

namespace {

struct State {
    double u, v;
};

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0, e3 = 500.0 / 1113.0 - 7571.0 / 16695.0,
                 e4 = 125.0 / 192.0 - 393.0 / 640.0,
                 e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0, e6 = 11.0 / 84.0 - 187.0 / 2100.0,
                 e7 = -1.0 / 40.0;

struct Stepper {
    const Nonlinearity& nl;
    double tol;

    State rhs(const State& s) const {
        const double a = std::abs(s.u);
        const double force = s.u - std::pow(a, nl.p - 2.0) * s.u;
        return {s.v, force};
    }

    // One accepted DP5(4) step from x with suggested size h (clipped by the
    // caller); returns the new state and updates h for the next attempt.
    State step(double& x, const State& y, double& h, double hmax) const {
        State k1 = rhs(y);
        for (int attempt = 0; attempt < 64; ++attempt) {
            const State k2 = rhs({y.u + h * a21 * k1.u, y.v + h * a21 * k1.v});
            const State k3 =
                rhs({y.u + h * (a31 * k1.u + a32 * k2.u), y.v + h * (a31 * k1.v + a32 * k2.v)});
            const State k4 = rhs({y.u + h * (a41 * k1.u + a42 * k2.u + a43 * k3.u),
                                  y.v + h * (a41 * k1.v + a42 * k2.v + a43 * k3.v)});
            const State k5 =
                rhs({y.u + h * (a51 * k1.u + a52 * k2.u + a53 * k3.u + a54 * k4.u),
                     y.v + h * (a51 * k1.v + a52 * k2.v + a53 * k3.v + a54 * k4.v)});
            const State k6 = rhs(
                {y.u + h * (a61 * k1.u + a62 * k2.u + a63 * k3.u + a64 * k4.u + a65 * k5.u),
                 y.v + h * (a61 * k1.v + a62 * k2.v + a63 * k3.v + a64 * k4.v + a65 * k5.v)});
            const State ynew = {y.u + h * (b1 * k1.u + b3 * k3.u + b4 * k4.u + b5 * k5.u + b6 * k6.u),
                                y.v + h * (b1 * k1.v + b3 * k3.v + b4 * k4.v + b5 * k5.v + b6 * k6.v)};
            const State k7 = rhs(ynew);
            const double erru =
                h * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u + e6 * k6.u + e7 * k7.u);
            const double errv =
                h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v + e7 * k7.v);
            const double su = tol + tol * std::max(std::abs(y.u), std::abs(ynew.u));
            const double sv = tol + tol * std::max(std::abs(y.v), std::abs(ynew.v));
            const double err =
                std::sqrt(0.5 * ((erru / su) * (erru / su) + (errv / sv) * (errv / sv)));
            if (err <= 1.0) {
                x += h;
                const double grow =
                    err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                h = std::min(h * grow, hmax);
                if (std::abs(ynew.u) > 1e8 || !std::isfinite(ynew.u) || !std::isfinite(ynew.v))
                    throw IntegrationFailure("integrate_ivp: solution blow-up", x);
                return ynew;
            }
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
            if (h < 1e-14 * hmax)
                throw IntegrationFailure("integrate_ivp: step-size underflow", x);
        }
        throw IntegrationFailure("integrate_ivp: step control failed to settle", x);
    }
};

} // namespace

EdgeProfile integrate_ivp(const Nonlinearity& nl, double z, double slope0, double length,
                          double tol) {
    if (!(length > 0.0)) throw std::invalid_argument("integrate_ivp: length must be positive");
    if (!(tol >= 1e-12 && tol <= 1e-6))
        throw std::invalid_argument("integrate_ivp: tol outside [1e-12, 1e-6]");

    const long n_out =
        std::max<long>(201, std::min<long>(20001, static_cast<long>(std::ceil(500.0 * length)) + 1));
    EdgeProfile profile;
    profile.kind = EdgeKind::pendant_arc;
    profile.samples.reserve(n_out);
    profile.level = hamiltonian(nl, {z, slope0});

    Stepper stepper{nl, tol};
    State y{z, slope0};
    double x = 0.0;
    double h = length / 100.0;
    profile.samples.push_back({0.0, y.u, y.v});
    double drift = 0.0;
    for (long i = 1; i < n_out; ++i) {
        const double target = length * static_cast<double>(i) / (n_out - 1);
        while (x < target) {
            double hc = std::min(h, target - x);
            const double h_in = hc;
            y = stepper.step(x, y, hc, length);
            // keep the controller's suggestion unless we clipped to land on
            // the output point
            if (h_in >= h) h = hc;
        }
        profile.samples.push_back({target, y.u, y.v});
        drift = std::max(drift, std::abs(hamiltonian(nl, {y.u, y.v}) - profile.level));
    }
    profile.hamiltonian_drift = drift;
    return profile;
}

} // namespace nlsgraph
