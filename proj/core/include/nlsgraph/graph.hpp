#pragma once

#include <optional>
#include <string>
#include <vector>

namespace nlsgraph {

// Metric graph made of half-lines, pendants and loops all attached at one
// vertex. Loops are stored by their total length.
struct SingleKnotGraph {
    int half_lines = 1;
    std::vector<double> pendant_lengths;
    std::vector<double> loop_lengths;

    void validate() const; // throws std::invalid_argument
};

// All pendants have length ell, all loops 2*ell; after the dummy-vertex
// convention the compact core is E = P + 2L edges of length ell.
struct RegularGraph {
    int H = 1;
    int P = 0;
    int L = 0;
    double ell = 1.0;

    int compact_edges() const { return P + 2 * L; }
    void validate() const;
    SingleKnotGraph general() const;
};

struct HalfLineSplit {
    int H_plus = 0;
    int H_minus = 0;
};

// theta = (H+ - H-) / (P + 2L). Star graphs (P = L = 0) are rejected:
// the incidence index is undefined there.
double incidence_index(const RegularGraph& g, const HalfLineSplit& s);

struct ExistenceVerdict {
    bool holds = true;
    std::optional<int> violating_n;
    double tanh_sum = 0.0;
};

// Checks sum_pendants tanh(l) + 2 sum_loops tanh(l/2) != H - 2n for
// n = 0..floor(H/2), with equality tolerance 1e-12.
ExistenceVerdict existence_condition(const SingleKnotGraph& g);

// All (H+, H-) with H+ + H- = H, ordered by decreasing H+.
std::vector<HalfLineSplit> enumerate_splits(int H);

// Pendant-only equivalent: each loop is cut at its middle point into two
// pendants carrying a zero-derivative condition at x = ell.
RegularGraph normalize_loops(const RegularGraph& g);

// Graph input file: {"regular": {"H","P","L","ell"}} or
// {"general": {"H","pendants","loops"}} (loops by total length).
// Unknown keys are rejected.
SingleKnotGraph load_graph(const std::string& path);
SingleKnotGraph parse_graph(const std::string& json_text);

// A general graph is regular when every pendant has the same length ell
// and every loop has total length 2*ell.
std::optional<RegularGraph> as_regular(const SingleKnotGraph& g, double rel_tol = 1e-12);

} // namespace nlsgraph
