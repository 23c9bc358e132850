#pragma once

#include "nlsgraph/length_functions.hpp"
#include "nlsgraph/nonlinearity.hpp"

#include <optional>
#include <string>

namespace nlsgraph {

// Expected monotone-solution counts for a (theta, ell) query, together
// with the thresholds that organize the dispatch. max = -1 means
// "no upper bound established" (large incidence indices can fold).
struct TheoremPrediction {
    int item = 0; // dispatch case 1..6 ordered by theta regime
    std::string description;
    bool constant_solution = false;
    int min_increasing = 0;
    int max_increasing = 0;
    int min_decreasing = 0;
    int max_decreasing = 0;
    double threshold_center = 0.0;                    // pi/sqrt(p-2)
    std::optional<double> threshold_decreasing;       // asinh(|theta|/sqrt(1-theta^2))
    bool near_threshold = false; // ell within 1e-6 of a binding threshold
};

struct ClassificationReport {
    double theta = 0.0;
    double ell = 0.0;
    TheoremPrediction predicted;
    RootSet increasing_roots;
    RootSet decreasing_roots;
    bool consistent = true;
};

// Dispatch on theta, solve the applicable length-function branches, and
// compare computed root counts against the prediction (vacuously
// consistent inside a 1e-6 neighborhood of a binding threshold).
ClassificationReport classify_monotone(const Nonlinearity& nl, double theta, double ell);

} // namespace nlsgraph
