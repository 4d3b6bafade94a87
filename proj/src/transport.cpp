#include "satmix/transport.hpp"

#include <cmath>
#include <string>

namespace satmix {

double cfl_dt(const FaceField& U, const FaceField& w, const Grid& g,
              const StepParams& params) {
    if (!(params.cfl_safety > 0.0 && params.cfl_safety < 0.5))
        throw ConfigError("transport: cfl_safety must lie in (0, 0.5)");
    if (params.dt_cap && !(*params.dt_cap > 0.0))
        throw ConfigError("transport: dt_cap must be positive");
    double speed = U.max_abs() + w.max_abs();
    double h = g.one_dimensional() ? g.dx : std::min(g.dx, g.dy);
    if (speed == 0.0) {
        if (params.dt_cap) return *params.dt_cap;
        throw ZeroVelocityNoCap("transport: both velocity fields vanish and no dt cap given");
    }
    double dt = params.cfl_safety * h / speed;
    if (params.dt_cap) dt = std::min(dt, *params.dt_cap);
    return dt;
}

ScalarField advect_step(const ScalarField& rho, const FaceField& U,
                        const FaceField& w, double dt, const Grid& g) {
    if (!(dt > 0.0)) throw ConfigError("transport: dt must be positive");
    double speed = U.max_abs() + w.max_abs();
    double h = g.one_dimensional() ? g.dx : std::min(g.dx, g.dy);
    if (speed > 0.0 && dt >= 0.5 * h / speed)
        throw CflViolation("transport: dt " + std::to_string(dt) +
                           " violates the strict bound " +
                           std::to_string(0.5 * h / speed));

    // Per-face totals of the two separately upwinded fluxes.
    FaceField flux(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i <= g.nx; ++i) {
            FacePair f = xface_cells(g, i, j);
            if (!f.active) continue;
            flux.xf(i, j) = upwind_flux(U.xf(i, j), rho[f.cm], rho[f.cp]) +
                            upwind_flux(w.xf(i, j), rho[f.cm], rho[f.cp]);
        }
    }
    for (int j = 0; j <= g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            FacePair f = yface_cells(g, i, j);
            if (!f.active) continue;
            flux.yf(i, j) = upwind_flux(U.yf(i, j), rho[f.cm], rho[f.cp]) +
                            upwind_flux(w.yf(i, j), rho[f.cm], rho[f.cp]);
        }
    }

    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            int c = g.cell(i, j);
            if (!g.is_fluid(c)) continue;
            double div = (flux.xf(i + 1, j) - flux.xf(i, j)) / g.dx +
                         (flux.yf(i, j + 1) - flux.yf(i, j)) / g.dy;
            out[c] = rho[c] - dt * div;
        }
    }
    return out;
}

}  // namespace satmix
