#pragma once

namespace nlsgraph {

// Scalar data of the planar system u'' = u - |u|^{p-2}u. The potential is
// f(x) = x^2/2 - |x|^p/p; orbits live on level sets of the Hamiltonian
// F(u, u') = -u'^2/2 + f(u).
struct Nonlinearity {
    double p;          // exponent, restricted to (2, 10]
    double apex;       // (p/2)^{1/(p-2)}, amplitude of the soliton at x = 0
    double fmax;       // f(1) = (p-2)/(2p), the maximum of f on (0, inf)
    double inflection; // (1/(p-1))^{1/(p-2)}, the positive zero of f''
    double apex_potential; // f at the rounded apex (~1e-17), used to keep
                           // potential() unbiased right at the apex

    explicit Nonlinearity(double exponent);
};

struct PhasePoint {
    double u;
    double slope;
};

double potential(const Nonlinearity& nl, double x);
// f(t) - f(zref) for t, zref >= 0, free of the catastrophic cancellation
// the plain difference suffers when t ~ zref near the maximum of f.
double potential_difference(const Nonlinearity& nl, double t, double zref);
// order in {1,2,3}; anything else throws std::invalid_argument.
double potential_derivative(const Nonlinearity& nl, double x, int order);
double hamiltonian(const Nonlinearity& nl, const PhasePoint& pt);

// Inverse of f over [0,1]; valid for c in [0, fmax].
double potential_inverse_low(const Nonlinearity& nl, double c);
// Inverse of f over [1, inf); valid for c <= fmax.
double potential_inverse_high(const Nonlinearity& nl, double c);

// phi(x) = apex * sech^{2/(p-2)}((p-2)x/2), the real-line homoclinic.
double soliton(const Nonlinearity& nl, double x);
double soliton_slope(const Nonlinearity& nl, double x);
// The unique y >= 0 with phi(y) = z, for z in (0, apex].
double soliton_inverse(const Nonlinearity& nl, double z);

// A(t) = 1/2 - (f(t)-f(1)) f''(t) / f'(t)^2, continuously extended through
// t = 1 (A(1) = 0). Positive on (0,1), negative on (1,inf), tends to
// -(p-2)/(2p) at infinity.
double coeff_a(const Nonlinearity& nl, double t);

// g(t) = -3 f'' f'^2 + 6 (f-f(1)) f''^2 - 2 (f-f(1)) f''' f'.
// Negative for t != 1; t within 1e-9 of 1 is rejected (g(1) = 0).
double coeff_g(const Nonlinearity& nl, double t);

// g(t)/f'(t)^4, with the removable singularity at t = 1 patched by a
// first-order series. Smooth integrand of the regularized derivative form.
double coeff_g_over_fp4(const Nonlinearity& nl, double t);

// Sign certificates used by the monotonicity diagnostics.
double certificate_psi(const Nonlinearity& nl, double z, double x, double theta);
double certificate_h(const Nonlinearity& nl, double x, double theta);

} // namespace nlsgraph
