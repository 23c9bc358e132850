#pragma once

#include "nlsgraph/classification.hpp"
#include "nlsgraph/graph.hpp"
#include "nlsgraph/nonlinearity.hpp"
#include "nlsgraph/ode.hpp"

#include <string>
#include <utility>
#include <vector>

namespace nlsgraph {

struct BoundStateDiagnostics {
    double nk_residual = 0.0;       // |sum of inward derivatives at the knot|
    double hamiltonian_drift = 0.0; // max over edges
    double terminal_slope = 0.0;    // max |u'(ell)| over compact edges
    double level_error = 0.0;       // max |level - (1-theta^2) f(z)| (core-symmetric only)
    double min_amplitude = 0.0;     // min u over compact edges
};

enum class StateKind { constant_core, core_increasing, core_decreasing, concentrated };

struct BoundState {
    RegularGraph graph; // normalized: loops cut into pendant pairs
    HalfLineSplit split;
    double z = 0.0;     // u at the knot
    double y = 0.0;     // soliton shift, phi(y) = z
    double theta = 0.0;
    StateKind kind = StateKind::core_increasing;
    std::vector<EdgeProfile> profiles;
    double action = 0.0; // NaN while not valid
    BoundStateDiagnostics diagnostics;
    bool valid = false;
    std::string label;
};

inline constexpr double kNkResidualTol = 1e-7;
inline constexpr double kTerminalSlopeTol = 1e-7;
inline constexpr double kDriftTol = 1e-8;
inline constexpr double kLevelIdentityTol = 1e-10;

// Profiles: H+ half-lines carry phi(x+y), H- carry phi(x-y) with
// y = soliton_inverse(z); each compact edge is integrated from
// (z, theta * sqrt(2 f(z))). Flagged valid only when all diagnostics
// pass, i.e. z genuinely closes the overdetermined problem.
BoundState build_core_symmetric(const Nonlinearity& nl, const RegularGraph& g,
                                const HalfLineSplit& s, double z, double ode_tol = 1e-10);

// Action computed two ways: (a) the full functional by trapezoid over the
// sampled profiles plus closed-form half-line tails, (b) (1/2 - 1/p)
// ||u||_p^p via phase-plane arcs. Returns (b); throws
// InconsistentStateError when they disagree beyond 1e-5 relative.
double action(const Nonlinearity& nl, const BoundState& state);

// Lengths to the first slope zero of the two concentration arcs started
// at amplitude z with |w1'(0)| = b and w2'(0) set by the vertex balance
// over E0 concentrated edges.
std::pair<double, double> pm_maps(const Nonlinearity& nl, double z, double b, int H,
                                  int P_plus_2L, int E0);

// Large-ell bound-state concentrating a near half-soliton on E0 compact
// edges, located by a sign-change scan plus Broyden refinement of
// (g1 - ell, g2 - ell) over the search box. Throws NoRootError when no
// sign-change box exists (ell too small).
BoundState concentrated_state(const Nonlinearity& nl, const RegularGraph& g, int E0,
                              double eps);

// All valid candidates realizing one split: the constant core when
// H+ = H-, plus one state per length-function root. The classification
// report backing the construction is exposed on request.
std::vector<BoundState> split_candidates(const Nonlinearity& nl, const RegularGraph& g,
                                         const HalfLineSplit& s,
                                         ClassificationReport* out_report = nullptr);

struct RankedCandidate {
    BoundState state;
    std::string label;
    bool open_flag = false;
};

struct Ranking {
    std::vector<RankedCandidate> entries; // action ascending
    std::string caveat;
};

// Candidate pool over every split plus every realizable concentration
// count, sorted by action. The top entry is flagged open when the
// leader's margin is below 1e-4 * S(phi) or the regime is one where
// ordering is not settled (small edge lengths with several half-lines,
// flower-like graphs, folded root sets).
Ranking rank_candidates(const Nonlinearity& nl, const RegularGraph& g,
                        double concentration_eps = 0.05);

// Soliton integrals (full-line and tail pieces, amplitude-parametrized).
double soliton_norm_p(const Nonlinearity& nl);                      // ||phi||_p^p over R
double soliton_action(const Nonlinearity& nl);                      // (1/2-1/p)||phi||_p^p
double soliton_tail_moment(const Nonlinearity& nl, double z, int q); // int_y^inf phi^q dx
double soliton_tail_h1(const Nonlinearity& nl, double z);            // int_y^inf phi'^2 dx

} // namespace nlsgraph
