#pragma once

#include <utility>
#include <vector>

#include "satmix/errors.hpp"

namespace satmix {

// Nonnegative piecewise-constant density on a uniform n-cell grid over [0,1].
struct Density1D {
    int n = 0;
    std::vector<double> v;
    Density1D() = default;
    Density1D(int n_, std::vector<double> vals);
    double dx() const { return 1.0 / n; }
    double mass() const;
};

// Generalized inverse of the cumulative mass: inf{ x : M(x) >= m }.
// Piecewise linear in m across positive cells, jumping over empty ones.
// Requires 0 <= m <= mass (within 1e-12) and positive total mass.
double quantile(const Density1D& rho, double m);

// Squared 2-Wasserstein distance between equal-mass densities, as the exact
// segment-wise integral of (q_a - q_b)^2 over mass. Throws MassMismatch when
// the masses differ beyond 1e-12.
double w2_squared(const Density1D& a, const Density1D& b);
double w2(const Density1D& a, const Density1D& b);

// Product-measure additivity check for mu = mu1 x mu2, nu = nu1 x nu2.
// lhs: product-space squared transport cost of the pair map (r1, r2), each
//      factor cost integrated in x against its marginal (map route).
// rhs: mass-weighted sum M2 * W2^2(mu1,nu1) + M1 * W2^2(mu2,nu2) via the
//      quantile-difference route.
// Both are equal analytically; the two code paths differ.
std::pair<double, double> product_w2_check(const Density1D& mu1, const Density1D& nu1,
                                           const Density1D& mu2, const Density1D& nu2);

// d W2^2(a, b) / d a_j, via the transport potential psi with psi' = 2(x-T(x)),
// T the monotone map from a to b; entry j is the integral of psi over cell j.
// Defined up to a common additive constant (mass-neutral directions only).
std::vector<double> w2_squared_gradient(const Density1D& a, const Density1D& b);

struct JkoParams {
    double tau = 0.01;     // time step of the minimizing movement
    double pg_tol = 1e-7;  // stationarity-gap stopping threshold
    int max_iters = 50000;
    double step0 = 0.0;    // initial step size, 0 = auto
};

struct JkoResult {
    Density1D rho1;
    int iterations = 0;
    double objective = 0.0;
    // largest available descent rate over feasible pairwise mass exchanges
    // (per unit mass); 0 at the constrained minimum
    double pg_norm = 0.0;
};

// One minimizing-movement step for the two-phase congestion functional:
// minimize int D1 rho1 + int D2 (1-rho1)
//        + (1/2 tau) [ W2^2(rho1, prev1) + W2^2(1-rho1, 1-prev1) ]
// over 0 <= rho1 <= 1 with the mass of rho1 fixed. Projected gradient
// descent with backtracking onto the capped simplex, plus exact line
// searches along the steepest pairwise mass exchange where W2^2 is kinked
// (cells at 0 or 1). Descent is monotone; the objective is convex and
// every feasible direction decomposes into pairwise exchanges, so a zero
// exchange gap certifies the constrained minimum.
JkoResult jko_step(const Density1D& prev1, const std::vector<double>& D1,
                   const std::vector<double>& D2, const JkoParams& params);

// Euclidean projection onto { 0 <= v <= 1, sum(v) * dx = mass }.
std::vector<double> project_capped_simplex(const std::vector<double>& u, double dx,
                                           double mass);

}  // namespace satmix
