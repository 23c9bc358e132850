#include "nlsgraph/classification.hpp"

#include <cmath>
#include <stdexcept>

namespace nlsgraph {

namespace {

constexpr double kThresholdNeighborhood = 1e-6;

TheoremPrediction predict(const Nonlinearity& nl, double theta, double ell) {
    TheoremPrediction p;
    p.threshold_center = threshold_length_center(nl);
    if (theta > -1.0 && theta < 1.0 && theta != 0.0)
        p.threshold_decreasing = threshold_length_decreasing(nl, -std::abs(theta));

    if (theta <= -1.0) {
        p.item = 5;
        p.description = "theta <= -1: no positive solutions for any edge length";
        return p;
    }
    if (theta < 0.0) {
        p.item = 3;
        const double t2 = *p.threshold_decreasing;
        p.near_threshold = std::abs(ell - t2) < kThresholdNeighborhood;
        if (ell < t2) {
            p.description = "theta in (-1,0), ell below the decreasing threshold: no monotone solutions";
        } else {
            p.description = "theta in (-1,0), ell above the decreasing threshold: unique decreasing solution";
            p.min_decreasing = p.max_decreasing = 1;
        }
        return p;
    }
    if (theta == 0.0) {
        p.item = 1;
        p.constant_solution = true;
        p.near_threshold = std::abs(ell - p.threshold_center) < kThresholdNeighborhood;
        if (ell <= p.threshold_center) {
            p.description = "theta = 0, ell at or below pi/sqrt(p-2): constant solution only";
        } else {
            p.description =
                "theta = 0, ell above pi/sqrt(p-2): constant solution plus unique increasing and "
                "unique decreasing solutions";
            p.min_increasing = p.max_increasing = 1;
            p.min_decreasing = p.max_decreasing = 1;
        }
        return p;
    }
    if (theta < 1.0) {
        p.item = 2;
        p.description = "theta in (0,1): unique increasing solution for every edge length";
        p.min_increasing = p.max_increasing = 1;
        return p;
    }
    if (theta == 1.0) {
        p.item = 4;
        p.description = "theta = 1: unique increasing solution, a portion of the soliton";
        p.min_increasing = p.max_increasing = 1;
        return p;
    }
    if (theta <= 2.0) {
        p.item = 6;
        p.description = "theta in (1,2]: unique increasing solution for every edge length";
        p.min_increasing = p.max_increasing = 1;
        return p;
    }
    p.item = 6;
    p.description =
        "theta > 2: increasing solutions exist for every edge length; multiplicity possible "
        "inside the fold window of the length function";
    p.min_increasing = 1;
    p.max_increasing = -1;
    return p;
}

bool count_matches(int count, int lo, int hi) {
    if (hi < 0) return count >= lo;
    return count >= lo && count <= hi;
}

} // namespace

ClassificationReport classify_monotone(const Nonlinearity& nl, double theta, double ell) {
    if (!(ell > 0.0)) throw std::invalid_argument("classify_monotone: ell must be positive");
    ClassificationReport report;
    report.theta = theta;
    report.ell = ell;
    report.predicted = predict(nl, theta, ell);

    if (theta >= 0.0) {
        LengthQuery q{nl, theta, Branch::increasing, ell, 400};
        report.increasing_roots = solve_length(q);
    }
    if (theta > -1.0 && theta <= 0.0) {
        LengthQuery q{nl, theta, Branch::decreasing, ell, 400};
        report.decreasing_roots = solve_length(q);
    }

    if (report.predicted.near_threshold) {
        report.consistent = true;
    } else {
        report.consistent =
            count_matches(static_cast<int>(report.increasing_roots.roots.size()),
                          report.predicted.min_increasing, report.predicted.max_increasing) &&
            count_matches(static_cast<int>(report.decreasing_roots.roots.size()),
                          report.predicted.min_decreasing, report.predicted.max_decreasing);
    }
    return report;
}

} // namespace nlsgraph
