#pragma once

#include <vector>

#include "satmix/errors.hpp"

namespace satmix {

// Piecewise-constant function on [0,1]: breakpoints sorted, first 0, last 1,
// values[k] on (breakpoints[k], breakpoints[k+1]).
struct PiecewiseConstant1D {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

void validate(const PiecewiseConstant1D& f);
double pc_mass(const PiecewiseConstant1D& f);
double pc_eval(const PiecewiseConstant1D& f, double x);

// Exact cell averages of f on a uniform n-cell grid over [0,1].
std::vector<double> cell_averages(const PiecewiseConstant1D& f, int n);

// Exact integral of |f - g|.
double l1_distance(const PiecewiseConstant1D& f, const PiecewiseConstant1D& g);
double l1_distance(const std::vector<double>& a, const std::vector<double>& b);

// Godunov numerical flux for f(r) = r (1 - r) U: the min of f over [rl, rr]
// when rl <= rr, the max over [rr, rl] otherwise (sonic point 1/2).
double godunov_flux(double rho_left, double rho_right, double U);

// Entropy solution of d_t r + d_x (r (1 - r) U) = 0 on (0,1) with a zero-flux
// wall at x = 1 and a free left boundary (ghost = interior value), computed
// by a fine-grid Godunov scheme at CFL number cfl and averaged down to n_eval
// uniform cells. The internal grid is n_eval * refine cells.
std::vector<double> exact_entropy_solution(const PiecewiseConstant1D& rho0,
                                           double U, double t, int n_eval,
                                           int refine = 16, double cfl = 0.4);

// Long-time limit for U > 0: the indicator of [1 - M, 1], M the initial mass.
PiecewiseConstant1D steady_state_1d(const PiecewiseConstant1D& rho0);

}  // namespace satmix
