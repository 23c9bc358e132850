#pragma once

// Internal adaptive-quadrature building blocks shared by quadrature.cpp
// and length_functions.cpp. Not installed.

#include "nlsgraph/errors.hpp"
#include "nlsgraph/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace nlsgraph::detail {

constexpr long kEvalBudget = 200000;

struct EvalCounter {
    long count = 0;
    double best = 0.0; // best running estimate, reported on budget overrun
    void bump() {
        if (++count > kEvalBudget)
            throw ConvergenceError("quadrature: evaluation budget exhausted", best, HUGE_VAL);
    }
};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

// Gauss-Kronrod 7-15 nodes/weights (QUADPACK dqk15).
inline constexpr double kXgk[8] = {
    0.9914553711208126392068546975263285, 0.9491079123427585245261896840478513,
    0.8648644233597690727897127886409262, 0.7415311855993944398638647732807884,
    0.5860872354676911302941448382587296, 0.4058451513773971669066064120769615,
    0.2077849550078984676006894037732449, 0.0};
inline constexpr double kWgk[8] = {
    0.0229353220105292249637320080589695, 0.0630920926299785532907006631892042,
    0.1047900103222501838398763225415180, 0.1406532597155259187451895905102379,
    0.1690047266392679028265834265985503, 0.1903505780647854099132564024210137,
    0.2044329400752988924141619992346491, 0.2094821410847278280129991748917143};
inline constexpr double kWg[4] = {
    0.1294849661688696932706114326790820, 0.2797053914892766679014677714237796,
    0.3818300505051189449503697754889751, 0.4179591836734693877551020408163265};

template <typename F>
Panel gk15(F&& fn, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = fn(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = fn(c - x);
        const double f2 = fn(c + x);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    return {a, b, resk * h, std::abs((resk - resg) * h)};
}

template <typename F>
QuadratureResult adaptive_gk(F&& fn, double a, double b, double tol, EvalCounter& evals) {
    if (a == b) return {0.0, 0.0, evals.count};
    auto counted = [&](double x) {
        evals.bump();
        return fn(x);
    };
    std::priority_queue<Panel> panels;
    Panel whole = gk15(counted, a, b);
    double total = whole.value;
    double err = whole.error;
    panels.push(whole);
    evals.best = total;
    while (err > tol && !panels.empty()) {
        Panel worst = panels.top();
        if (worst.error <= 0.0) break;
        // Stop subdividing once panels reach rounding width.
        if (std::abs(worst.b - worst.a) <
            1e-15 * std::max(std::abs(worst.a) + std::abs(worst.b), 1e-12))
            break;
        panels.pop();
        const double m = 0.5 * (worst.a + worst.b);
        Panel left = gk15(counted, worst.a, m);
        Panel right = gk15(counted, m, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        evals.best = total;
        panels.push(left);
        panels.push(right);
    }
    return {total, std::max(err, 0.0), evals.count};
}

} // namespace nlsgraph::detail
