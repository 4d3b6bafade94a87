#include "satmix/projection.hpp"

#include "satmix/transport.hpp"
#include "satmix/velocity.hpp"

namespace satmix {

ScalarField divergence_upwind(const ScalarField& rho, const FaceField& V,
                              const Grid& g) {
    FaceField flux(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            FacePair f = xface_cells(g, i, j);
            if (f.active) flux.xf(i, j) = upwind_flux(V.xf(i, j), rho[f.cm], rho[f.cp]);
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            FacePair f = yface_cells(g, i, j);
            if (f.active) flux.yf(i, j) = upwind_flux(V.yf(i, j), rho[f.cm], rho[f.cp]);
        }

    ScalarField div(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.cell(i, j);
            if (!g.is_fluid(c)) continue;
            div[c] = (flux.xf(i + 1, j) - flux.xf(i, j)) / g.dx +
                     (flux.yf(i, j + 1) - flux.yf(i, j)) / g.dy;
        }
    return div;
}

Correction correction_velocity(const ScalarField& rho, const FaceField& U,
                               const Grid& g, const LinearSystem& sys,
                               double tol, const ScalarField* initial_guess) {
    Correction res;
    ScalarField rhs = divergence_upwind(rho, U, g);
    res.p = solve_pressure(sys, rhs, tol, initial_guess, &res.solver_iterations);
    res.w = face_gradient(res.p, g);
    for (double& v : res.w.x) v = -v;
    for (double& v : res.w.y) v = -v;
    return res;
}

Correction correction_velocity(const ScalarField& rho, const FaceField& U,
                               const Grid& g, const BCSpec& bc, double tol) {
    LinearSystem sys = assemble_laplacian(g, bc);
    return correction_velocity(rho, U, g, sys, tol, nullptr);
}

}  // namespace satmix
