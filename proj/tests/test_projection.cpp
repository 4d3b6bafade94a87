#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "satmix/projection.hpp"
#include "satmix/sim.hpp"
#include "satmix/transport.hpp"
#include "satmix/velocity.hpp"
#include "support/oracles.hpp"

using namespace satmix;

namespace {

FaceField constant_U(const Grid& g, double ux, double uy = 0.0) {
    PotentialSpec vs;
    vs.kind = VelocityKind::constant_vector;
    vs.ux = ux;
    vs.uy = uy;
    return desired_velocity(vs, ScalarField(g), g);
}

// Plain face-difference divergence of a face field.
ScalarField face_divergence(const FaceField& V, const Grid& g) {
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.cell(i, j);
            if (!g.is_fluid(c)) continue;
            out[c] = (V.xf(i + 1, j) - V.xf(i, j)) / g.dx +
                     (V.yf(i, j + 1) - V.yf(i, j)) / g.dy;
        }
    return out;
}

}  // namespace

TEST_CASE("upwind divergence by hand on three cells") {
    Grid g = build_grid(3, 1, AxisBc::wall, AxisBc::wall, {});
    ScalarField rho(g);
    rho[0] = 0.2;
    rho[1] = 0.6;
    rho[2] = 1.0;
    FaceField U = constant_U(g, 1.0);
    ScalarField d = divergence_upwind(rho, U, g);
    CHECK(d[0] == doctest::Approx(0.6));
    CHECK(d[1] == doctest::Approx(1.2));
    CHECK(d[2] == doctest::Approx(-1.8));
}

TEST_CASE("solid neighbours block the flux") {
    Grid g = build_grid(5, 5, AxisBc::wall, AxisBc::wall,
                        {MaskRect{0.45, 0.55, 0.45, 0.55}});
    REQUIRE(g.fluid_count == 24);
    ScalarField rho(g);
    for (int c = 0; c < g.cells(); ++c) rho[c] = g.is_fluid(c) ? 1.0 : 0.0;
    FaceField U = constant_U(g, 1.0);
    ScalarField d = divergence_upwind(rho, U, g);
    // upstream cell of the solid loses its outlet, downstream cell its inlet
    CHECK(d[g.cell(1, 2)] == doctest::Approx(-5.0));
    CHECK(d[g.cell(3, 2)] == doctest::Approx(5.0));
    CHECK(d[g.cell(2, 2)] == 0.0);
}

TEST_CASE("flux differences telescope to zero total") {
    Grid g = build_grid(20, 20, AxisBc::wall, AxisBc::wall,
                        {MaskRect{0.3, 0.7, 0.0, 0.45}});
    ScalarField rho(g);
    rho.v = oracle::random_density(g.cells(), 7);
    for (int c = 0; c < g.cells(); ++c)
        if (!g.is_fluid(c)) rho[c] = 0.0;
    FaceField U = constant_U(g, 0.8, -0.4);
    ScalarField d = divergence_upwind(rho, U, g);
    double total = 0.0;
    for (int c = 0; c < g.cells(); ++c) total += d[c] * g.cell_volume();
    CHECK(std::abs(total) <= 1e-12);
}

TEST_CASE("correction cancels the upwind divergence cell by cell") {
    auto run_check = [](const Grid& g, PressureBc kind, const ScalarField& rho,
                        const FaceField& U) {
        BCSpec bc;
        bc.kind = kind;
        ScalarField rhs = divergence_upwind(rho, U, g);
        Correction corr = correction_velocity(rho, U, g, bc, 1e-12);
        ScalarField div_w = face_divergence(corr.w, g);
        double scale = 1.0;
        for (int c = 0; c < g.cells(); ++c) scale = std::max(scale, std::abs(rhs[c]));
        for (int c = 0; c < g.cells(); ++c)
            CHECK(std::abs(div_w[c] + rhs[c]) <= 1e-9 * scale);
    };

    Grid g1 = build_grid(64, 1, AxisBc::wall, AxisBc::wall, {});
    ScalarField rho1 = bernoulli_init(g1, 0.6, 5);
    run_check(g1, PressureBc::dirichlet_left_1d, rho1, constant_U(g1, 1.0));

    Grid g2 = build_grid(9, 9, AxisBc::wall, AxisBc::wall,
                         {MaskRect{0.4, 0.6, 0.0, 0.5}});
    ScalarField rho2(g2);
    rho2.v = oracle::random_density(g2.cells(), 11);
    for (int c = 0; c < g2.cells(); ++c)
        if (!g2.is_fluid(c)) rho2[c] = 0.0;
    run_check(g2, PressureBc::neumann_walls, rho2, constant_U(g2, 1.0, 0.5));

    Grid g3 = build_grid(12, 12, AxisBc::periodic, AxisBc::periodic, {});
    ScalarField rho3(g3);
    rho3.v = oracle::random_density(g3.cells(), 13);
    run_check(g3, PressureBc::periodic, rho3, constant_U(g3, -0.7, 0.3));
}

TEST_CASE("complement density stays the complement") {
    // rho moves with U + w, its complement with w alone; the corrected pair
    // keeps rho + mu = 1 because the flux sum telescopes to U rho + w whose
    // divergence the pressure solve removes
    Grid g = build_grid(64, 1, AxisBc::wall, AxisBc::wall, {});
    ScalarField rho = bernoulli_init(g, 0.5, 21);
    ScalarField mu(g);
    for (int c = 0; c < g.cells(); ++c) mu[c] = 1.0 - rho[c];

    FaceField U = constant_U(g, 1.0);
    FaceField zero(g);
    BCSpec bc;
    bc.kind = PressureBc::dirichlet_left_1d;
    LinearSystem sys = assemble_laplacian(g, bc);
    StepParams sp;

    for (int s = 0; s < 100; ++s) {
        Correction corr = correction_velocity(rho, U, g, sys, 1e-12);
        double dt = cfl_dt(U, corr.w, g, sp);
        rho = advect_step(rho, U, corr.w, dt, g);
        mu = advect_step(mu, zero, corr.w, dt, g);
        for (int c = 0; c < g.cells(); ++c)
            CHECK(std::abs(rho[c] + mu[c] - 1.0) <= 1e-10);
    }
}

TEST_CASE("correction is idempotent on corrected fields") {
    // after one correction the total flux U rho + w has zero divergence, so a
    // second solve returns w = 0 (same operator, zero rhs up to tolerance)
    Grid g = build_grid(32, 1, AxisBc::wall, AxisBc::wall, {});
    ScalarField rho = bernoulli_init(g, 0.7, 2);
    FaceField U = constant_U(g, 1.0);
    BCSpec bc;
    bc.kind = PressureBc::dirichlet_left_1d;
    Correction corr = correction_velocity(rho, U, g, bc, 1e-12);
    ScalarField rhs = divergence_upwind(rho, U, g);
    ScalarField div_w = face_divergence(corr.w, g);
    ScalarField residual(g);
    for (int c = 0; c < g.cells(); ++c) residual[c] = rhs[c] + div_w[c];
    double mx = 0.0, scale = 1.0;
    for (int c = 0; c < g.cells(); ++c) {
        mx = std::max(mx, std::abs(residual[c]));
        scale = std::max(scale, std::abs(rhs[c]));
    }
    CHECK(mx <= 1e-9 * scale);
}
