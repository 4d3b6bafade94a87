#pragma once

#include "satmix/poisson.hpp"

namespace satmix {

// Discrete divergence of the upwind mass flux of rho carried by face
// velocities V. Wall boundary faces and fluid-solid faces contribute zero.
ScalarField divergence_upwind(const ScalarField& rho, const FaceField& V,
                              const Grid& g);

struct Correction {
    FaceField w;   // -grad(p) on interior fluid-fluid faces, 0 on walls/solid
    ScalarField p;
    int solver_iterations = 0;
};

// Congestion correction: solves Lap_h(p) = div_upwind(rho U) under bc and
// differentiates back to faces, so that div(w) = -div_upwind(rho U) cell by
// cell. Supplying the previous pressure as initial_guess warm-starts the
// iterative solver; the result does not depend on it beyond solver tolerance.
Correction correction_velocity(const ScalarField& rho, const FaceField& U,
                               const Grid& g, const LinearSystem& sys,
                               double tol = 1e-10,
                               const ScalarField* initial_guess = nullptr);

// Convenience overload assembling the operator on the fly.
Correction correction_velocity(const ScalarField& rho, const FaceField& U,
                               const Grid& g, const BCSpec& bc,
                               double tol = 1e-10);

}  // namespace satmix
