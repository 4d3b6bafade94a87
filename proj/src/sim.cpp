#include "satmix/sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <sstream>

#include "satmix/errors.hpp"
#include "satmix/projection.hpp"

namespace satmix {

ScalarField bernoulli_init(const Grid& g, double q, unsigned long long seed) {
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("bernoulli q must lie in (0, 1)");
    std::mt19937_64 rng(seed);
    ScalarField rho(g.cells());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.cell(i, j);
            if (!g.is_fluid(c)) continue;
            // Fixed recipe, not std::uniform_real_distribution: the draw must
            // be identical across standard library implementations.
            double u = double(rng() >> 11) * 0x1.0p-53;
            rho[c] = u < q ? 1.0 : 0.0;
        }
    return rho;
}

namespace {

double overlap_fraction(const MaskRect& r, double x0, double x1, double y0, double y1) {
    double ox = std::max(0.0, std::min(x1, r.x1) - std::max(x0, r.x0));
    double oy = std::max(0.0, std::min(y1, r.y1) - std::max(y0, r.y0));
    return ox * oy / ((x1 - x0) * (y1 - y0));
}

}  // namespace

ScalarField init_field(const InitSpec& init, const Grid& g) {
    ScalarField rho(g.cells());
    switch (init.kind) {
        case InitKind::bernoulli:
            return bernoulli_init(g, init.q, init.seed);
        case InitKind::array: {
            if ((int)init.values.size() != g.cells())
                throw ConfigError("init array has " + std::to_string(init.values.size()) +
                                  " values, grid has " + std::to_string(g.cells()) + " cells");
            for (int c = 0; c < g.cells(); ++c) {
                if (!g.is_fluid(c)) continue;
                double v = init.values[c];
                if (!(v >= 0.0 && v <= 1.0))
                    throw ConfigError("init array value outside [0, 1]");
                rho[c] = v;
            }
            return rho;
        }
        case InitKind::indicators: {
            for (const auto& term : init.terms) {
                if (!(term.rect.x0 <= term.rect.x1 && term.rect.y0 <= term.rect.y1))
                    throw ConfigError("init rect has inverted bounds");
                for (int j = 0; j < g.ny; ++j)
                    for (int i = 0; i < g.nx; ++i) {
                        int c = g.cell(i, j);
                        if (!g.is_fluid(c)) continue;
                        rho[c] += term.value * overlap_fraction(term.rect, i * g.dx, (i + 1) * g.dx,
                                                                j * g.dy, (j + 1) * g.dy);
                    }
            }
            for (int c = 0; c < g.cells(); ++c) {
                if (rho[c] < 0.0 || rho[c] > 1.0 + 1e-12)
                    throw ConfigError("indicator init leaves density outside [0, 1]");
                rho[c] = std::min(rho[c], 1.0);
            }
            return rho;
        }
    }
    throw ConfigError("unknown init kind");
}

namespace {

// BFS labeling of { rho >= thresh }; returns component count.
int label_components(const ScalarField& rho, const Grid& g, double thresh,
                     std::vector<int>* labels_out) {
    std::vector<int> label(g.cells(), -1);
    int count = 0;
    std::queue<int> q;
    for (int start = 0; start < g.cells(); ++start) {
        if (!g.is_fluid(start) || rho[start] < thresh || label[start] >= 0) continue;
        label[start] = count;
        q.push(start);
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            int i = c % g.nx, j = c / g.nx;
            const int di[4] = {-1, 1, 0, 0}, dj[4] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                int ii = i + di[k], jj = j + dj[k];
                if (ii < 0 || ii >= g.nx) {
                    if (!g.periodic_x()) continue;
                    ii = (ii + g.nx) % g.nx;
                }
                if (jj < 0 || jj >= g.ny) {
                    if (!g.periodic_y()) continue;
                    jj = (jj + g.ny) % g.ny;
                }
                int n = g.cell(ii, jj);
                if (!g.is_fluid(n) || rho[n] < thresh || label[n] >= 0) continue;
                label[n] = count;
                q.push(n);
            }
        }
        ++count;
    }
    if (labels_out) *labels_out = std::move(label);
    return count;
}

}  // namespace

int saturated_components(const ScalarField& rho, const Grid& g, double thresh) {
    return label_components(rho, g, thresh, nullptr);
}

double isoperimetric_ratio(const ScalarField& rho, const Grid& g, double thresh) {
    double area = 0.0, perim = 0.0;
    auto in_set = [&](int i, int j) -> bool {
        // Outside the fluid region (walls, solids) counts as boundary.
        if (i < 0 || i >= g.nx) {
            if (!g.periodic_x()) return false;
            i = (i + g.nx) % g.nx;
        }
        if (j < 0 || j >= g.ny) {
            if (!g.periodic_y()) return false;
            j = (j + g.ny) % g.ny;
        }
        int c = g.cell(i, j);
        return g.is_fluid(c) && rho[c] >= thresh;
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!in_set(i, j)) continue;
            area += g.dx * g.dy;
            if (!in_set(i - 1, j)) perim += g.dy;
            if (!in_set(i + 1, j)) perim += g.dy;
            if (!in_set(i, j - 1)) perim += g.dx;
            if (!in_set(i, j + 1)) perim += g.dx;
        }
    if (perim == 0.0) return 0.0;
    return 4.0 * M_PI * area / (perim * perim);
}

PressureBc resolve_pressure_bc(const ScenarioConfig& cfg, const Grid& g) {
    switch (cfg.pressure_bc) {
        case PressureBcChoice::dirichlet_left_1d:
            return PressureBc::dirichlet_left_1d;
        case PressureBcChoice::neumann_walls:
            return PressureBc::neumann_walls;
        case PressureBcChoice::periodic:
            return PressureBc::periodic;
        case PressureBcChoice::automatic:
            break;
    }
    if (g.periodic_x() && g.periodic_y()) return PressureBc::periodic;
    if (g.one_dimensional() && !g.periodic_x()) return PressureBc::dirichlet_left_1d;
    return PressureBc::neumann_walls;
}

PotentialSpec resolve_velocity(const VelocityConfig& vc, const Grid& g) {
    PotentialSpec spec;
    spec.kind = vc.kind;
    spec.ux = vc.ux;
    spec.uy = vc.uy;
    spec.potential = vc.potential;
    if (vc.kind == VelocityKind::geodesic_to_target) {
        spec.target.assign(g.cells(), 0);
        if (vc.target_right_wall) {
            // Rightmost fluid cell of every row.
            for (int j = 0; j < g.ny; ++j)
                for (int i = g.nx - 1; i >= 0; --i)
                    if (g.is_fluid(g.cell(i, j))) {
                        spec.target[g.cell(i, j)] = 1;
                        break;
                    }
        } else {
            for (const auto& r : vc.target_rects)
                for (int j = 0; j < g.ny; ++j)
                    for (int i = 0; i < g.nx; ++i)
                        if (r.contains(g.xc(i), g.yc(j))) spec.target[g.cell(i, j)] = 1;
        }
    }
    return spec;
}

namespace {

struct StepState {
    ScalarField rho1, rho2;
    bool two = false;
};

Trajectory run_impl(const ScenarioConfig& cfg) {
    Grid g = build_grid(cfg.nx, cfg.ny, cfg.bc_x, cfg.bc_y, cfg.mask);
    if (!(cfg.t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (!(cfg.snapshot_dt > 0.0)) throw ConfigError("snapshot_dt must be positive");
    if (!(cfg.solver_tol > 0.0)) throw ConfigError("solver_tol must be positive");

    const bool two = cfg.mode == SimMode::two_species_experimental;

    BCSpec bc;
    bc.kind = resolve_pressure_bc(cfg, g);
    LinearSystem sys = assemble_laplacian(g, bc);

    PotentialSpec vspec1 = resolve_velocity(cfg.velocity, g);
    PotentialSpec vspec2;
    if (two) vspec2 = resolve_velocity(cfg.velocity2, g);

    StepParams sp;
    sp.cfl_safety = cfg.cfl_safety;
    sp.dt_cap = cfg.dt_cap;

    ScalarField rho1 = init_field(cfg.init, g);
    ScalarField rho2;
    if (two) {
        rho2 = ScalarField(g.cells());
        for (int c = 0; c < g.cells(); ++c)
            if (g.is_fluid(c)) rho2[c] = 1.0 - rho1[c];
    }

    const bool chemo1 = vspec1.kind == VelocityKind::chemotaxis;
    const bool chemo2 = two && vspec2.kind == VelocityKind::chemotaxis;
    // Chemotaxis re-solves its potential every step; keep one assembled system
    // (with its preconditioner) and warm-start each solve from the last one.
    LinearSystem chemo_sys;
    ScalarField s1, s2;
    if (chemo1 || chemo2) {
        BCSpec cbc;
        cbc.kind = (g.periodic_x() && (g.ny == 1 || g.periodic_y()))
                       ? PressureBc::periodic
                       : PressureBc::neumann_walls;
        chemo_sys = assemble_laplacian(g, cbc);
        s1 = ScalarField(g);
        s2 = ScalarField(g);
    }
    FaceField U1, U2;
    if (!chemo1) U1 = desired_velocity(vspec1, rho1, g, cfg.solver_tol);
    if (two && !chemo2) U2 = desired_velocity(vspec2, rho2, g, cfg.solver_tol);

    Trajectory traj;
    traj.grid = g;

    double t = 0.0;
    long step = 0;
    double last_dt = 0.0;
    int steady_streak = 0;
    bool drift_warned = false;
    ScalarField p_prev(g.cells());  // warm start carried across steps

    long snap_index = 1;
    const double t_scale = std::max(1.0, cfg.t_end);

    auto next_event = [&]() {
        double ts = snap_index * cfg.snapshot_dt;
        return ts < cfg.t_end - 1e-12 * t_scale ? ts : cfg.t_end;
    };

    auto emit = [&](const ScalarField& p, const FaceField& w) {
        Snapshot s;
        s.t = t;
        s.step = step;
        s.dt = last_dt;
        s.rho1 = rho1;
        if (two) s.rho2 = rho2;
        s.p = p;
        s.mass1 = total_mass(rho1, g);
        s.mass2 = two ? total_mass(rho2, g)
                      : g.fluid_count * g.cell_volume() - s.mass1;
        s.rho_min = 1.0;
        s.rho_max = 0.0;
        for (int c = 0; c < g.cells(); ++c)
            if (g.is_fluid(c)) {
                s.rho_min = std::min(s.rho_min, rho1[c]);
                s.rho_max = std::max(s.rho_max, rho1[c]);
            }
        s.w_inf = w.max_abs();
        s.saturated_components = saturated_components(rho1, g);
        traj.snapshots.push_back(std::move(s));
    };

    while (true) {
        if (chemo1) {
            s1 = solve_chemoattractant(chemo_sys, rho1, cfg.solver_tol, &s1);
            U1 = face_gradient(s1, g);
        }
        if (chemo2) {
            s2 = solve_chemoattractant(chemo_sys, rho2, cfg.solver_tol, &s2);
            U2 = face_gradient(s2, g);
        }

        ScalarField rhs = divergence_upwind(rho1, U1, g);
        if (two) {
            ScalarField rhs2 = divergence_upwind(rho2, U2, g);
            for (int c = 0; c < g.cells(); ++c) rhs[c] += rhs2[c];
        }
        int cg_iters = 0;
        ScalarField p = solve_pressure(sys, rhs, cfg.solver_tol, &p_prev, &cg_iters);
        traj.solver_iterations += cg_iters;
        p_prev = p;
        FaceField w = face_gradient(p, g);
        for (double& v : w.x) v = -v;
        for (double& v : w.y) v = -v;

        bool at_snapshot = std::abs(t - next_event()) <= 1e-12 * t_scale || step == 0;
        bool done = t >= cfg.t_end - 1e-12 * t_scale || steady_streak >= 3;
        if (at_snapshot || done) {
            emit(p, w);
            if (!done && snap_index * cfg.snapshot_dt < cfg.t_end - 1e-12 * t_scale &&
                std::abs(t - snap_index * cfg.snapshot_dt) <= 1e-12 * t_scale)
                ++snap_index;
        }
        if (done) {
            traj.steady_detected = steady_streak >= 3;
            break;
        }

        double dt = two ? std::min(cfl_dt(U1, w, g, sp), cfl_dt(U2, w, g, sp))
                        : cfl_dt(U1, w, g, sp);
        double cap = next_event() - t;
        bool landed = false;
        if (dt >= cap) {
            dt = cap;
            landed = true;
        }

        ScalarField new1 = advect_step(rho1, U1, w, dt, g);
        ScalarField new2;
        if (two) new2 = advect_step(rho2, U2, w, dt, g);

        double change = 0.0;
        for (int c = 0; c < g.cells(); ++c)
            if (g.is_fluid(c)) {
                change += std::abs(new1[c] - rho1[c]);
                if (two) change += std::abs(new2[c] - rho2[c]);
            }
        change *= g.cell_volume();
        steady_streak = change / dt <= 1e-12 ? steady_streak + 1 : 0;

        rho1 = std::move(new1);
        if (two) rho2 = std::move(new2);
        t = landed ? next_event() : t + dt;
        ++step;
        last_dt = dt;
        traj.dt_history.push_back(dt);

        if (two && !drift_warned) {
            double drift = 0.0;
            for (int c = 0; c < g.cells(); ++c)
                if (g.is_fluid(c)) drift = std::max(drift, std::abs(rho1[c] + rho2[c] - 1.0));
            // Tolerated drift grows like 10 * dt per unit time.
            if (drift > 10.0 * dt * std::max(t, dt)) {
                std::ostringstream os;
                os << "ConstraintDrift: max |rho1 + rho2 - 1| = " << drift << " at t = " << t;
                traj.warnings.push_back(os.str());
                drift_warned = true;
            }
        }
    }

    traj.steps = step;
    traj.final_time = t;
    return traj;
}

}  // namespace

Trajectory run(const ScenarioConfig& cfg) { return run_impl(cfg); }

Trajectory run_two_species(const ScenarioConfig& cfg) {
    if (cfg.mode != SimMode::two_species_experimental)
        throw ConfigError("run_two_species requires two_species_experimental mode");
    return run_impl(cfg);
}

}  // namespace satmix
