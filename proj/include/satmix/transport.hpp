#pragma once

#include <optional>

#include "satmix/grid.hpp"

namespace satmix {

struct StepParams {
    double cfl_safety = 0.45;            // must lie strictly inside (0, 1/2)
    std::optional<double> dt_cap;        // fallback when both velocities vanish
};

// Donor-cell flux through a face: u * rho_minus if u > 0, u * rho_plus if
// u < 0, 0 if u == 0. Satisfies upwind_flux(u, 1-a, 1-b) = u - upwind_flux(u, a, b).
inline double upwind_flux(double u, double rho_minus, double rho_plus) {
    if (u > 0.0) return u * rho_minus;
    if (u < 0.0) return u * rho_plus;
    return 0.0;
}

// Stable step size: cfl_safety * min(dx, dy) / (max|U| + max|w|), capped by
// dt_cap when present. Throws ZeroVelocityNoCap if both fields vanish and no
// cap is given.
double cfl_dt(const FaceField& U, const FaceField& w, const Grid& g,
              const StepParams& params);

// One forward Euler step of the split upwind update: the U fluxes and the w
// fluxes are upwinded separately and both divergence differences are applied.
// Wall boundary faces and fluid-solid faces carry zero flux. Throws
// CflViolation if dt reaches (1/2) min(dx,dy) / (max|U| + max|w|).
ScalarField advect_step(const ScalarField& rho, const FaceField& U,
                        const FaceField& w, double dt, const Grid& g);

}  // namespace satmix
