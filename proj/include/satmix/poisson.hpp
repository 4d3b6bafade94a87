#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "satmix/grid.hpp"

namespace satmix {

// Pressure boundary treatment. The stencil always follows the grid tags
// (wrap on periodic axes, zero co-normal gradient at walls and solid faces);
// the kind selects the gauge:
//   dirichlet_left_1d  p = 0 at the left boundary of a 1D grid, imposed by
//                      ghost reflection; the system is nonsingular.
//   neumann_walls      closed box, nullspace = constants, zero-mean gauge.
//   periodic           fully periodic, nullspace = constants, zero-mean gauge.
enum class PressureBc { dirichlet_left_1d, neumann_walls, periodic };

struct BCSpec {
    PressureBc kind = PressureBc::neumann_walls;
    // Prescribed co-normal derivative on wall boundary faces; enters the
    // right-hand side of boundary cells. Empty means homogeneous.
    std::optional<FaceField> neumann_data;
};

struct MgHierarchy;  // multigrid preconditioner state, built on first solve

// Matrix-free symmetric second-difference operator over fluid cells.
struct LinearSystem {
    const Grid* g = nullptr;
    BCSpec bc;
    bool nullspace_constants = false;
    std::vector<double> diag;      // per cell, 0 on solid
    std::vector<int> nbr;          // 4 entries per cell, -1 = inactive face
    std::vector<double> nbr_coef;  // matching off-diagonal coefficients
    mutable std::shared_ptr<MgHierarchy> mg;

    // y = Lap_h(p). Solid cells of the result are 0.
    ScalarField apply(const ScalarField& p) const;
};

LinearSystem assemble_laplacian(const Grid& g, const BCSpec& bc);

// Solves Lap_h(p) = rhs (minus any prescribed Neumann boundary data folded
// into the rhs). Conjugate gradient preconditioned by a geometric multigrid
// V-cycle (Galerkin-coarsened, mask-aware); grids below 400 fluid unknowns
// use a direct dense elimination. Residual criterion: max-norm <=
// tol * max(1, max|rhs|). For singular kinds the rhs compatibility defect
// beyond 1e-10 * ||rhs||_1 raises IncompatibleRhs and the returned p has
// zero mean over fluid cells.
ScalarField solve_pressure(const LinearSystem& sys, const ScalarField& rhs,
                           double tol = 1e-10,
                           const ScalarField* initial_guess = nullptr,
                           int* iterations_out = nullptr);

// Chemoattractant potential: solves Lap_h(S) = -(rho - mean(rho)) with the
// grid's boundary tags and zero-mean gauge. The mean subtraction renders the
// closed-domain problem solvable; S is defined up to that gauge choice.
ScalarField solve_chemoattractant(const Grid& g, const ScalarField& rho,
                                  double tol = 1e-10,
                                  const ScalarField* initial_guess = nullptr);

// Same, reusing a caller-held system (and its preconditioner) across steps.
ScalarField solve_chemoattractant(const LinearSystem& sys, const ScalarField& rho,
                                  double tol = 1e-10,
                                  const ScalarField* initial_guess = nullptr);

}  // namespace satmix
