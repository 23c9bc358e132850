#pragma once

#include "nlsgraph/nonlinearity.hpp"

#include <string>
#include <vector>

namespace nlsgraph {

enum class EdgeKind { pendant_arc, half_line };

struct ProfileSample {
    double x;
    double u;
    double slope;
};

// A sampled solution on one edge plus its Hamiltonian level.
struct EdgeProfile {
    std::string edge_id;
    EdgeKind kind = EdgeKind::pendant_arc;
    std::vector<ProfileSample> samples;
    double level = 0.0;           // F(u, u') at x = 0
    double hamiltonian_drift = 0.0; // max |F(u,u') - level| over the samples
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) solution of
// u'' = u - |u|^{p-2}u with u(0) = z, u'(0) = slope0 on [0, length],
// sampled at >= 200 uniformly spaced output points. Throws
// IntegrationFailure on blow-up or step underflow (carrying the last
// valid x), std::invalid_argument on bad length/tol.
EdgeProfile integrate_ivp(const Nonlinearity& nl, double z, double slope0, double length,
                          double tol);

} // namespace nlsgraph
