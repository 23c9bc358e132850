#include "nlsgraph/bound_state.hpp"

#include "nlsgraph/errors.hpp"
#include "nlsgraph/quadrature.hpp"
#include "quad_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nlsgraph {

namespace {

constexpr int kHalfLineSamples = 256;

double slope_at_knot(const Nonlinearity& nl, double theta, double z) {
    return theta * std::sqrt(2.0 * potential(nl, z));
}

EdgeProfile half_line_profile(const Nonlinearity& nl, double y, bool decaying,
                              const std::string& id) {
    EdgeProfile p;
    p.edge_id = id;
    p.kind = EdgeKind::half_line;
    p.level = 0.0;
    const double span = y + 14.0;
    double drift = 0.0;
    p.samples.reserve(kHalfLineSamples);
    for (int i = 0; i < kHalfLineSamples; ++i) {
        const double x = span * i / (kHalfLineSamples - 1);
        const double arg = decaying ? x + y : x - y;
        const double u = soliton(nl, arg);
        const double v = soliton_slope(nl, arg);
        p.samples.push_back({x, u, v});
        drift = std::max(drift, std::abs(hamiltonian(nl, {u, v})));
    }
    p.hamiltonian_drift = drift;
    return p;
}

struct ActionParts {
    double functional;    // route (a): full action formula
    double norm_p;        // ||u||_p^p accumulated along route (b)
};

double trapezoid_action(const Nonlinearity& nl, const EdgeProfile& prof) {
    double acc = 0.0;
    auto density = [&](const ProfileSample& s) {
        return 0.5 * (s.slope * s.slope + s.u * s.u) -
               std::pow(std::abs(s.u), nl.p) / nl.p;
    };
    for (size_t i = 0; i + 1 < prof.samples.size(); ++i) {
        const double h = prof.samples[i + 1].x - prof.samples[i].x;
        acc += 0.5 * h * (density(prof.samples[i]) + density(prof.samples[i + 1]));
    }
    return acc;
}

double compact_arc_norm_p(const Nonlinearity& nl, const EdgeProfile& prof, double ell) {
    const double u0 = prof.samples.front().u;
    const double uL = prof.samples.back().u;
    if (std::abs(uL - u0) <= 1e-9 * std::max(1.0, std::abs(u0)))
        return ell * std::pow(std::abs(u0), nl.p); // constant core
    if (uL > u0) {
        const double turn = potential_inverse_high(nl, prof.level);
        return arc_norm_p(nl, u0, turn, ArcLevel{turn, 1.0});
    }
    const double turn = potential_inverse_low(nl, prof.level);
    return arc_norm_p(nl, turn, u0, ArcLevel{turn, 1.0});
}

} // namespace

double soliton_norm_p(const Nonlinearity& nl) {
    return 2.0 * arc_norm_p(nl, 0.0, nl.apex, 0.0);
}

double soliton_action(const Nonlinearity& nl) {
    return (0.5 - 1.0 / nl.p) * soliton_norm_p(nl);
}

double soliton_tail_moment(const Nonlinearity& nl, double z, int q) {
    if (!(z >= 0.0 && z <= nl.apex))
        throw std::domain_error("soliton_tail_moment: amplitude outside [0, apex]");
    if (z == 0.0) return 0.0;
    return arc_moment(nl, 0.0, z, 0.0, q);
}

double soliton_tail_h1(const Nonlinearity& nl, double z) {
    if (!(z >= 0.0 && z <= nl.apex))
        throw std::domain_error("soliton_tail_h1: amplitude outside [0, apex]");
    if (z == 0.0) return 0.0;
    // int_y^inf phi'^2 dx = int_0^z sqrt(2 f(t)) dt; smooth integrand.
    detail::EvalCounter evals;
    auto integrand = [&](double t) {
        const double f = potential(nl, t);
        return std::sqrt(2.0 * std::max(f, 0.0));
    };
    return detail::adaptive_gk(integrand, 0.0, z, 1e-12, evals).value;
}

double action(const Nonlinearity& nl, const BoundState& state) {
    const double p = nl.p;
    const double full_p = soliton_norm_p(nl);
    const double full_2 = 2.0 * soliton_tail_moment(nl, nl.apex, 2);
    const double full_h1 = 2.0 * soliton_tail_h1(nl, nl.apex);

    double functional = 0.0;
    double norm_p = 0.0;
    for (const EdgeProfile& prof : state.profiles) {
        if (prof.kind == EdgeKind::pendant_arc) {
            functional += trapezoid_action(nl, prof);
            norm_p += compact_arc_norm_p(nl, prof, state.graph.ell);
            continue;
        }
        const double z0 = prof.samples.front().u;
        const bool decaying = prof.samples.front().slope <= 0.0;
        const double tail_p = arc_norm_p(nl, 0.0, z0, 0.0);
        const double tail_2 = soliton_tail_moment(nl, z0, 2);
        const double tail_h1 = soliton_tail_h1(nl, z0);
        if (decaying) {
            functional += 0.5 * (tail_h1 + tail_2) - tail_p / p;
            norm_p += tail_p;
        } else {
            functional += 0.5 * ((full_h1 - tail_h1) + (full_2 - tail_2)) - (full_p - tail_p) / p;
            norm_p += full_p - tail_p;
        }
    }
    const double arc_route = (0.5 - 1.0 / p) * norm_p;
    if (std::abs(functional - arc_route) >= 1e-5 * std::max(1.0, std::abs(arc_route)))
        throw InconsistentStateError(
            "action: functional and phase-plane routes disagree beyond 1e-5 relative");
    return arc_route;
}

namespace {

void finalize_diagnostics(const Nonlinearity& nl, BoundState& st, bool check_level_identity) {
    double nk = 0.0;
    double drift = 0.0;
    double terminal = 0.0;
    double level_err = 0.0;
    double min_amp = std::numeric_limits<double>::infinity();
    const double expected_level = (1.0 - st.theta * st.theta) * potential(nl, st.z);
    for (const EdgeProfile& prof : st.profiles) {
        nk += prof.samples.front().slope;
        drift = std::max(drift, prof.hamiltonian_drift);
        if (prof.kind == EdgeKind::pendant_arc) {
            terminal = std::max(terminal, std::abs(prof.samples.back().slope));
            if (check_level_identity)
                level_err = std::max(level_err, std::abs(prof.level - expected_level));
            for (const ProfileSample& s : prof.samples) min_amp = std::min(min_amp, s.u);
        }
    }
    st.diagnostics.nk_residual = std::abs(nk);
    st.diagnostics.hamiltonian_drift = drift;
    st.diagnostics.terminal_slope = terminal;
    st.diagnostics.level_error = level_err;
    st.diagnostics.min_amplitude = min_amp;

    st.valid = st.diagnostics.nk_residual < kNkResidualTol &&
               st.diagnostics.terminal_slope < kTerminalSlopeTol &&
               st.diagnostics.hamiltonian_drift < kDriftTol &&
               st.diagnostics.level_error < kLevelIdentityTol &&
               st.diagnostics.min_amplitude > 0.0;
    if (st.valid) {
        st.action = action(nl, st);
        st.valid = st.action > 0.0;
    } else {
        st.action = std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

BoundState build_core_symmetric(const Nonlinearity& nl, const RegularGraph& g,
                                const HalfLineSplit& s, double z, double ode_tol) {
    g.validate();
    if (g.compact_edges() == 0)
        throw UnsupportedTopologyError("build_core_symmetric: star graph has no compact core");
    if (!(z > 0.0 && z < nl.apex))
        throw std::domain_error("build_core_symmetric: z outside (0, apex)");

    BoundState st;
    st.graph = normalize_loops(g);
    st.split = s;
    st.z = z;
    st.theta = incidence_index(st.graph, s);
    st.y = soliton_inverse(nl, z);

    const double slope0 = slope_at_knot(nl, st.theta, z);
    EdgeProfile core = integrate_ivp(nl, z, slope0, st.graph.ell, ode_tol);
    const int E = st.graph.compact_edges();
    for (int i = 0; i < E; ++i) {
        EdgeProfile copy = core;
        copy.edge_id = "k" + std::to_string(i + 1);
        st.profiles.push_back(std::move(copy));
    }
    for (int i = 0; i < g.H; ++i) {
        const bool decaying = i < s.H_plus;
        st.profiles.push_back(half_line_profile(nl, st.y, decaying, "h" + std::to_string(i + 1)));
    }

    if (st.theta == 0.0 && std::abs(z - 1.0) <= 1e-9)
        st.kind = StateKind::constant_core;
    else if (slope0 > 0.0 || (slope0 == 0.0 && core.samples.back().u > z))
        st.kind = StateKind::core_increasing;
    else
        st.kind = StateKind::core_decreasing;

    std::ostringstream label;
    switch (st.kind) {
    case StateKind::constant_core: label << "constant-core"; break;
    case StateKind::core_increasing: label << "core-increasing"; break;
    case StateKind::core_decreasing: label << "core-decreasing"; break;
    case StateKind::concentrated: break;
    }
    label << " split(" << s.H_plus << "," << s.H_minus << ")";
    st.label = label.str();

    finalize_diagnostics(nl, st, /*check_level_identity=*/true);
    return st;
}

std::pair<double, double> pm_maps(const Nonlinearity& nl, double z, double b, int H,
                                  int P_plus_2L, int E0) {
    if (!(z > 0.0 && z < 1.0)) throw std::domain_error("pm_maps: z outside (0, 1)");
    const double fz = potential(nl, z);
    if (!(b > 0.0 && b < std::sqrt(2.0 * fz)))
        throw std::domain_error("pm_maps: b outside (0, sqrt(2 f(z)))");
    if (E0 < 1 || E0 > P_plus_2L || H < 1)
        throw std::domain_error("pm_maps: bad edge counts");

    const double z1 = potential_inverse_low(nl, fz - 0.5 * b * b);
    const double g1 = arc_length(nl, z1, z, ArcLevel{z1, 1.0});

    const double w2 = (H * std::sqrt(2.0 * fz) + (P_plus_2L - E0) * b) / E0;
    const double z2 = potential_inverse_high(nl, fz - 0.5 * w2 * w2);
    const double g2 = arc_length(nl, z, z2, ArcLevel{z2, 1.0});
    return {g1, g2};
}

namespace {

// Concentration search in x = (log z, log u) with u = z1/z: both
// coordinates keep full relative resolution however deep the
// concentration sits, while b itself loses it (b -> sqrt(2 f(z)) within
// an ulp for long edges).
struct ConcentrationMaps {
    const Nonlinearity& nl;
    int H, P2L, E0;

    struct Eval {
        double g1, g2, z1, z2, b, w2;
    };

    Eval at(double lz, double lu) const {
        Eval e{};
        const double z = std::exp(lz);
        const double u = std::exp(lu);
        e.z1 = u * z;
        const double db = potential_difference(nl, z, e.z1); // f(z) - f(z1) > 0
        e.b = std::sqrt(2.0 * std::max(db, 0.0));
        e.g1 = arc_length(nl, e.z1, z, ArcLevel{e.z1, 1.0});
        const double fz = potential(nl, z);
        e.w2 = (H * std::sqrt(2.0 * fz) + (P2L - E0) * e.b) / E0;
        e.z2 = potential_inverse_high(nl, fz - 0.5 * e.w2 * e.w2);
        e.g2 = arc_length(nl, z, e.z2, ArcLevel{e.z2, 1.0});
        return e;
    }
};

} // namespace

BoundState concentrated_state(const Nonlinearity& nl, const RegularGraph& g, int E0,
                              double eps) {
    g.validate();
    const RegularGraph gn = normalize_loops(g);
    const int P2L = gn.compact_edges();
    if (P2L == 0)
        throw UnsupportedTopologyError("concentrated_state: star graph has no compact core");
    if (E0 < 1 || E0 > P2L)
        throw std::invalid_argument("concentrated_state: E0 outside [1, P + 2L]");
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("concentrated_state: eps outside (0, 0.5]");

    const double ell = g.ell;
    const ConcentrationMaps maps{nl, g.H, P2L, E0};

    // Search box, scanned 40 x 40. g1 and g2 both diverge like |log| at the
    // low ends, so logarithmic spacing makes the sign structure visible.
    const int N = 40;
    const double lz_hi = std::log(eps);
    const double lz_lo = std::min(std::log(1e-8), -(ell + 6.0));
    const double lu_hi = std::log(0.97);
    const double lu_lo = std::min(std::log(1e-12), -(ell + 8.0));

    std::vector<double> lzs(N), lus(N);
    for (int i = 0; i < N; ++i) {
        lzs[i] = lz_lo + (lz_hi - lz_lo) * i / (N - 1);
        lus[i] = lu_lo + (lu_hi - lu_lo) * i / (N - 1);
    }
    std::vector<double> G1(N * N), G2(N * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const auto e = maps.at(lzs[i], lus[j]);
            G1[i * N + j] = e.g1 - ell;
            G2[i * N + j] = e.g2 - ell;
        }

    // Sign-change cell: g1 - ell changes sign across the u-direction while
    // keeping its sign along z-edges, and vice versa for g2 - ell.
    int ci = -1, cj = -1;
    for (int i = 0; i + 1 < N && ci < 0; ++i)
        for (int j = 0; j + 1 < N; ++j) {
            const double a = G1[i * N + j], bb = G1[(i + 1) * N + j];
            const double c = G1[i * N + j + 1], d = G1[(i + 1) * N + j + 1];
            const double e = G2[i * N + j], f = G2[i * N + j + 1];
            const double gg = G2[(i + 1) * N + j], h = G2[(i + 1) * N + j + 1];
            const bool g1_flips = (a > 0) == (bb > 0) && (c > 0) == (d > 0) && (a > 0) != (c > 0);
            const bool g2_flips = (e > 0) == (f > 0) && (gg > 0) == (h > 0) && (e > 0) != (gg > 0);
            if (g1_flips && g2_flips) {
                ci = i;
                cj = j;
                break;
            }
        }
    if (ci < 0)
        throw NoRootError("concentrated_state: no sign-change box; edge length too small "
                          "for a concentrated state at this eps");

    // Damped Broyden refinement projected back into the box.
    double x0 = 0.5 * (lzs[ci] + lzs[ci + 1]);
    double x1 = 0.5 * (lus[cj] + lus[cj + 1]);
    auto F = [&](double a, double b2, ConcentrationMaps::Eval& ev) {
        ev = maps.at(a, b2);
        return std::pair<double, double>{ev.g1 - ell, ev.g2 - ell};
    };
    ConcentrationMaps::Eval ev{};
    auto [r1, r2] = F(x0, x1, ev);
    const double fd = 1e-6;
    ConcentrationMaps::Eval tmp{};
    auto [r1a, r2a] = F(x0 + fd, x1, tmp);
    auto [r1b, r2b] = F(x0, x1 + fd, tmp);
    double J[2][2] = {{(r1a - r1) / fd, (r1b - r1) / fd}, {(r2a - r2) / fd, (r2b - r2) / fd}};

    auto converged = [&](const ConcentrationMaps::Eval& e, double a, double b2) {
        // What matters physically is the terminal slope the residual would
        // leave on each edge family: |f'| at the turning amplitude scales it.
        const double s1 = std::abs(potential_derivative(nl, e.z1, 1));
        const double s2 = std::abs(potential_derivative(nl, e.z2, 1));
        return std::abs(a) * std::min(1.0, s1) < 1e-10 && std::abs(b2) * std::min(1.0, s2) < 1e-10;
    };

    bool ok = converged(ev, r1, r2);
    for (int it = 0; it < 80 && !ok; ++it) {
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (det == 0.0 || !std::isfinite(det))
            throw SolverError("concentrated_state: singular Broyden update");
        double dx0 = -(J[1][1] * r1 - J[0][1] * r2) / det;
        double dx1 = -(-J[1][0] * r1 + J[0][0] * r2) / det;
        double step = 1.0;
        double n0 = std::hypot(r1, r2);
        double nr1 = 0.0, nr2 = 0.0, nx0 = 0.0, nx1 = 0.0;
        ConcentrationMaps::Eval nev{};
        for (int damp = 0; damp < 8; ++damp, step *= 0.5) {
            nx0 = std::clamp(x0 + step * dx0, lz_lo, lz_hi);
            nx1 = std::clamp(x1 + step * dx1, lu_lo, lu_hi);
            std::tie(nr1, nr2) = F(nx0, nx1, nev);
            if (std::hypot(nr1, nr2) < n0 || converged(nev, nr1, nr2)) break;
        }
        const double s0 = nx0 - x0, s1m = nx1 - x1;
        const double d1 = nr1 - r1, d2 = nr2 - r2;
        const double ss = s0 * s0 + s1m * s1m;
        if (ss > 0.0) {
            const double u1 = d1 - (J[0][0] * s0 + J[0][1] * s1m);
            const double u2 = d2 - (J[1][0] * s0 + J[1][1] * s1m);
            J[0][0] += u1 * s0 / ss;
            J[0][1] += u1 * s1m / ss;
            J[1][0] += u2 * s0 / ss;
            J[1][1] += u2 * s1m / ss;
        }
        x0 = nx0;
        x1 = nx1;
        r1 = nr1;
        r2 = nr2;
        ev = nev;
        ok = converged(ev, r1, r2);
    }
    if (!ok) throw SolverError("concentrated_state: refinement did not converge");

    const double z = std::exp(x0);
    BoundState st;
    st.graph = gn;
    st.split = {g.H, 0};
    st.z = z;
    st.theta = incidence_index(gn, st.split);
    st.y = soliton_inverse(nl, z);
    st.kind = StateKind::concentrated;
    st.label = "concentrated E0=" + std::to_string(E0);

    const double ode_tol = 1e-11;
    EdgeProfile bump = integrate_ivp(nl, z, ev.w2, ell, ode_tol);
    EdgeProfile rest;
    if (P2L > E0) rest = integrate_ivp(nl, z, -ev.b, ell, ode_tol);
    for (int i = 0; i < P2L; ++i) {
        EdgeProfile copy = (i < E0) ? bump : rest;
        copy.edge_id = "k" + std::to_string(i + 1);
        st.profiles.push_back(std::move(copy));
    }
    for (int i = 0; i < g.H; ++i)
        st.profiles.push_back(half_line_profile(nl, st.y, true, "h" + std::to_string(i + 1)));

    finalize_diagnostics(nl, st, /*check_level_identity=*/false);
    return st;
}

std::vector<BoundState> split_candidates(const Nonlinearity& nl, const RegularGraph& g,
                                         const HalfLineSplit& s, ClassificationReport* out_report) {
    const double theta = incidence_index(g, s); // rejects star graphs
    const ClassificationReport report = classify_monotone(nl, theta, g.ell);
    if (out_report) *out_report = report;

    std::vector<BoundState> out;
    auto push_if_valid = [&](BoundState&& st, int index, int family) {
        if (family > 1)
            st.label += " root " + std::to_string(index + 1) + "/" + std::to_string(family);
        if (st.valid) out.push_back(std::move(st));
    };
    if (s.H_plus == s.H_minus) {
        BoundState st = build_core_symmetric(nl, g, s, 1.0);
        if (st.valid) out.push_back(std::move(st));
    }
    const int ni = static_cast<int>(report.increasing_roots.roots.size());
    for (int i = 0; i < ni; ++i)
        push_if_valid(build_core_symmetric(nl, g, s, report.increasing_roots.roots[i]), i, ni);
    const int nd = static_cast<int>(report.decreasing_roots.roots.size());
    for (int i = 0; i < nd; ++i)
        push_if_valid(build_core_symmetric(nl, g, s, report.decreasing_roots.roots[i]), i, nd);
    return out;
}

namespace {

bool realizable_concentration(int E0, int P, int L) {
    for (int P0 = std::min(P, E0); P0 >= 0; --P0) {
        const int rem = E0 - P0;
        if (rem % 2 == 0 && rem / 2 <= L) return true;
    }
    return false;
}

struct SortKey {
    int kind_rank;   // 0 = split family, 1 = concentrated
    int h_plus_neg;  // -H+ so larger H+ sorts first
    int branch_rank; // 0 constant, 1 increasing, 2 decreasing
    int index;

    bool operator<(const SortKey& o) const {
        if (kind_rank != o.kind_rank) return kind_rank < o.kind_rank;
        if (h_plus_neg != o.h_plus_neg) return h_plus_neg < o.h_plus_neg;
        if (branch_rank != o.branch_rank) return branch_rank < o.branch_rank;
        return index < o.index;
    }
};

SortKey key_of(const BoundState& st, int index) {
    SortKey k{};
    k.kind_rank = st.kind == StateKind::concentrated ? 1 : 0;
    k.h_plus_neg = -st.split.H_plus;
    switch (st.kind) {
    case StateKind::constant_core: k.branch_rank = 0; break;
    case StateKind::core_increasing: k.branch_rank = 1; break;
    case StateKind::core_decreasing: k.branch_rank = 2; break;
    case StateKind::concentrated: k.branch_rank = 3; break;
    }
    k.index = index;
    return k;
}

} // namespace

Ranking rank_candidates(const Nonlinearity& nl, const RegularGraph& g,
                        double concentration_eps) {
    g.validate();
    if (g.compact_edges() == 0)
        throw UnsupportedTopologyError("rank_candidates: star graph has no compact core");

    struct Entry {
        BoundState state;
        SortKey key;
        bool folded_family = false;
    };
    std::vector<Entry> pool;

    for (const HalfLineSplit& s : enumerate_splits(g.H)) {
        ClassificationReport report;
        std::vector<BoundState> states = split_candidates(nl, g, s, &report);
        const bool folded =
            report.increasing_roots.multiplicity_flag || report.decreasing_roots.multiplicity_flag;
        for (size_t i = 0; i < states.size(); ++i) {
            Entry e{std::move(states[i]), {}, folded};
            e.key = key_of(e.state, static_cast<int>(i));
            pool.push_back(std::move(e));
        }
    }
    const int P2L = g.compact_edges();
    for (int e0 = 1; e0 <= P2L; ++e0) {
        if (!realizable_concentration(e0, g.P, g.L)) continue;
        try {
            BoundState st = concentrated_state(nl, g, e0, concentration_eps);
            if (st.valid) {
                Entry e{std::move(st), {}, false};
                e.key = key_of(e.state, e0);
                pool.push_back(std::move(e));
            }
        } catch (const NoRootError&) {
            // expected below the concentration threshold
        }
    }
    if (pool.empty()) throw NoCandidateError("rank_candidates: empty candidate pool");

    std::sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
        if (a.state.action != b.state.action) return a.state.action < b.state.action;
        return a.key < b.key;
    });

    bool open = false;
    const double s_phi = soliton_action(nl);
    if (pool.size() > 1) {
        const double gap = pool[1].state.action - pool[0].state.action;
        if (gap < 1e-4 * s_phi) open = true;
        // Small-length regime with several half-lines: the ordering across
        // splits hinges on a first-order expansion that is not settled.
        if (g.H >= 2 && g.ell <= 0.25 * threshold_length_center(nl)) open = true;
        // Flower-like graphs: concentration on a loop and the symmetric
        // state share the limit action, so the leader is not decided.
        if (g.P == 0 && g.H == 1) {
            bool has_conc = false, has_sym = false;
            for (const Entry& e : pool)
                (e.state.kind == StateKind::concentrated ? has_conc : has_sym) = true;
            if (has_conc && has_sym) open = true;
        }
    }
    // A folded family at the top leaves the ground-state pick open.
    if (pool.front().folded_family) open = true;

    Ranking out;
    for (Entry& e : pool) {
        RankedCandidate c;
        c.label = e.state.label;
        c.state = std::move(e.state);
        out.entries.push_back(std::move(c));
    }
    out.entries.front().open_flag = open;
    out.caveat =
        "Pool holds positive core-symmetric and concentrated candidates only. For small edge "
        "lengths every ground-state is positive up to sign, so the ranking is complete there; "
        "in general it is a lower-bound candidate set that excludes sign-changing states.";
    return out;
}

} // namespace nlsgraph
