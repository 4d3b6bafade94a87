#include "satmix/velocity.hpp"

#include <cmath>
#include <limits>

#include "satmix/poisson.hpp"

namespace satmix {

FaceField face_gradient(const ScalarField& phi, const Grid& g) {
    FaceField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            FacePair f = xface_cells(g, i, j);
            if (f.active) out.xf(i, j) = (phi[f.cp] - phi[f.cm]) / g.dx;
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            FacePair f = yface_cells(g, i, j);
            if (f.active) out.yf(i, j) = (phi[f.cp] - phi[f.cm]) / g.dy;
        }
    return out;
}

FaceField desired_velocity(const PotentialSpec& spec, const ScalarField& rho,
                           const Grid& g, double tol) {
    switch (spec.kind) {
        case VelocityKind::constant_vector: {
            FaceField out(g);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i <= g.nx; ++i)
                    if (xface_cells(g, i, j).active) out.xf(i, j) = spec.ux;
            for (int j = 0; j <= g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    if (yface_cells(g, i, j).active) out.yf(i, j) = spec.uy;
            return out;
        }
        case VelocityKind::explicit_potential: {
            if (static_cast<int>(spec.potential.size()) != g.cells())
                throw ConfigError("velocity: potential size mismatch");
            ScalarField d(g);
            for (int c = 0; c < g.cells(); ++c)
                d[c] = g.is_fluid(c) ? -spec.potential[c] : 0.0;
            return face_gradient(d, g);
        }
        case VelocityKind::geodesic_to_target: {
            ScalarField dist = fast_march_distance(g, spec.target);
            ScalarField neg(g);
            for (int c = 0; c < g.cells(); ++c) {
                if (!g.is_fluid(c)) continue;
                // unreachable pockets see no drive rather than an infinite one
                neg[c] = std::isfinite(dist[c]) ? -dist[c] : 0.0;
            }
            FaceField out = face_gradient(neg, g);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i <= g.nx; ++i) {
                    FacePair f = xface_cells(g, i, j);
                    if (f.active && (!std::isfinite(dist[f.cm]) || !std::isfinite(dist[f.cp])))
                        out.xf(i, j) = 0.0;
                }
            for (int j = 0; j <= g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    FacePair f = yface_cells(g, i, j);
                    if (f.active && (!std::isfinite(dist[f.cm]) || !std::isfinite(dist[f.cp])))
                        out.yf(i, j) = 0.0;
                }
            return out;
        }
        case VelocityKind::chemotaxis: {
            ScalarField s = solve_chemoattractant(g, rho, tol);
            return face_gradient(s, g);
        }
    }
    throw ConfigError("velocity: unknown kind");
}

}  // namespace satmix
