#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "satmix/errors.hpp"
#include "satmix/exact1d.hpp"
#include "satmix/io.hpp"
#include "satmix/ot1d.hpp"
#include "satmix/projection.hpp"
#include "satmix/scenario.hpp"
#include "satmix/sim.hpp"

namespace {

using namespace satmix;

struct Overrides {
    std::string out;
    std::optional<unsigned long long> seed;
    std::string resolution;
};

void apply_overrides(ScenarioConfig& cfg, const Overrides& ov) {
    if (!ov.out.empty()) cfg.output.dir = ov.out;
    if (ov.seed) cfg.init.seed = *ov.seed;
    if (!ov.resolution.empty()) {
        int nx = 0, ny = 0;
        auto comma = ov.resolution.find(',');
        try {
            if (comma == std::string::npos) {
                nx = std::stoi(ov.resolution);
                ny = cfg.ny > 1 ? nx : 1;
            } else {
                nx = std::stoi(ov.resolution.substr(0, comma));
                ny = std::stoi(ov.resolution.substr(comma + 1));
            }
        } catch (const std::exception&) {
            throw ConfigError("--resolution must be NX or NX,NY");
        }
        if (nx < 3 || ny < 1) throw ConfigError("--resolution values out of range");
        cfg.nx = nx;
        cfg.ny = ny;
    }
}

int cmd_run(const std::string& scenario, const Overrides& ov) {
    ScenarioConfig cfg = resolve_scenario(scenario);
    apply_overrides(cfg, ov);
    Trajectory traj = run(cfg);
    for (const auto& w : traj.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (!cfg.output.dir.empty()) write_trajectory(traj, cfg.output);
    const Snapshot& last = traj.snapshots.back();
    std::printf("scenario %s: %dx%d, %ld steps, t_final=%.6g, steady=%s\n",
                cfg.name.empty() ? scenario.c_str() : cfg.name.c_str(), cfg.nx, cfg.ny, traj.steps,
                traj.final_time, traj.steady_detected ? "yes" : "no");
    std::printf("mass1=%.12g rho in [%.6g, %.6g], %zu snapshots%s%s\n", last.mass1, last.rho_min,
                last.rho_max, traj.snapshots.size(), cfg.output.dir.empty() ? "" : " -> ",
                cfg.output.dir.c_str());
    return 0;
}

// Exact piecewise-constant initial profile from indicator terms; requires a
// 1D single-species constant-velocity scenario.
PiecewiseConstant1D profile_from_config(const ScenarioConfig& cfg) {
    if (cfg.ny != 1) throw ConfigError("oracle requires a 1D scenario (ny = 1)");
    if (cfg.mode != SimMode::single_active) throw ConfigError("oracle requires single_active mode");
    if (cfg.velocity.kind != VelocityKind::constant_vector || cfg.velocity.uy != 0.0)
        throw ConfigError("oracle requires a constant x-velocity");
    if (cfg.init.kind != InitKind::indicators)
        throw ConfigError("oracle requires an indicator initial condition");
    if (!cfg.mask.empty()) throw ConfigError("oracle requires an unmasked interval");
    std::vector<double> bps = {0.0, 1.0};
    for (const auto& t : cfg.init.terms) {
        bps.push_back(std::clamp(t.rect.x0, 0.0, 1.0));
        bps.push_back(std::clamp(t.rect.x1, 0.0, 1.0));
    }
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    PiecewiseConstant1D f;
    f.breakpoints = bps;
    for (size_t k = 0; k + 1 < bps.size(); ++k) {
        double mid = 0.5 * (bps[k] + bps[k + 1]);
        double v = 0.0;
        for (const auto& t : cfg.init.terms)
            if (t.rect.x0 <= mid && mid <= t.rect.x1) v += t.value;
        f.values.push_back(v);
    }
    validate(f);
    return f;
}

// Forward FV solve on (0,1) capturing the state at each requested time.
std::vector<std::vector<double>> solve_1d_at_times(const ScenarioConfig& base, int nx,
                                                   const std::vector<double>& times) {
    ScenarioConfig cfg = base;
    cfg.nx = nx;
    cfg.ny = 1;
    cfg.output.dir.clear();
    cfg.t_end = times.back();
    Grid g = build_grid(cfg.nx, cfg.ny, cfg.bc_x, cfg.bc_y, cfg.mask);
    BCSpec bc;
    bc.kind = resolve_pressure_bc(cfg, g);
    LinearSystem sys = assemble_laplacian(g, bc);
    FaceField U = desired_velocity(resolve_velocity(cfg.velocity, g), ScalarField(g.cells()), g,
                                   cfg.solver_tol);
    StepParams sp;
    sp.cfl_safety = cfg.cfl_safety;
    ScalarField rho = init_field(cfg.init, g);
    ScalarField p_prev(g.cells());
    std::vector<std::vector<double>> result;
    double t = 0.0;
    size_t next = 0;
    while (next < times.size()) {
        if (t >= times[next] - 1e-13) {
            result.push_back(rho.v);
            ++next;
            continue;
        }
        ScalarField rhs = divergence_upwind(rho, U, g);
        ScalarField p = solve_pressure(sys, rhs, cfg.solver_tol, &p_prev);
        p_prev = p;
        FaceField w = face_gradient(p, g);
        for (double& v : w.x) v = -v;
        double dt = std::min(cfl_dt(U, w, g, sp), times[next] - t);
        rho = advect_step(rho, U, w, dt, g);
        t += dt;
    }
    return result;
}

int cmd_oracle1d(const std::string& scenario, const Overrides& ov) {
    ScenarioConfig cfg = resolve_scenario(scenario);
    apply_overrides(cfg, ov);
    PiecewiseConstant1D rho0 = profile_from_config(cfg);
    double U = cfg.velocity.ux;

    std::vector<double> times;
    for (double t = cfg.snapshot_dt; t < cfg.t_end - 1e-12; t += cfg.snapshot_dt)
        times.push_back(t);
    times.push_back(cfg.t_end);

    std::printf("solver vs exact entropy solution, NX = %d\n", cfg.nx);
    std::printf("%10s %14s %14s\n", "t", "L1", "Linf");
    auto states = solve_1d_at_times(cfg, cfg.nx, times);
    for (size_t k = 0; k < times.size(); ++k) {
        std::vector<double> exact = exact_entropy_solution(rho0, U, times[k], cfg.nx);
        double l1 = 0.0, linf = 0.0;
        for (int i = 0; i < cfg.nx; ++i) {
            double d = std::abs(states[k][i] - exact[i]);
            l1 += d / cfg.nx;
            linf = std::max(linf, d);
        }
        std::printf("%10.4g %14.6e %14.6e\n", times[k], l1, linf);
    }

    double tstar = times.front();
    std::printf("\nerror vs resolution at t = %.4g\n", tstar);
    std::printf("%8s %14s %10s\n", "NX", "L1", "order");
    double prev = 0.0;
    for (int nx : {50, 100, 200, 400}) {
        std::vector<double> exact = exact_entropy_solution(rho0, U, tstar, nx);
        auto state = solve_1d_at_times(cfg, nx, {tstar});
        double l1 = 0.0;
        for (int i = 0; i < nx; ++i) l1 += std::abs(state[0][i] - exact[i]) / nx;
        if (prev > 0.0)
            std::printf("%8d %14.6e %10.2f\n", nx, l1, std::log2(prev / l1));
        else
            std::printf("%8d %14.6e %10s\n", nx, l1, "-");
        prev = l1;
    }
    return 0;
}

int cmd_jko(const std::string& scenario, const Overrides& ov, int steps) {
    ScenarioConfig cfg = resolve_scenario(scenario);
    apply_overrides(cfg, ov);
    profile_from_config(cfg);  // validates shape: 1D, constant U, indicators
    int n = cfg.nx;
    if (n > 64) throw ConfigError("jko comparison needs nx <= 64");

    Grid g = build_grid(n, 1, cfg.bc_x, cfg.bc_y, cfg.mask);
    BCSpec bc;
    bc.kind = resolve_pressure_bc(cfg, g);
    LinearSystem sys = assemble_laplacian(g, bc);
    FaceField U = desired_velocity(resolve_velocity(cfg.velocity, g), ScalarField(g.cells()), g,
                                   cfg.solver_tol);
    StepParams sp;
    sp.cfl_safety = cfg.cfl_safety;

    ScalarField rho_fv = init_field(cfg.init, g);
    Density1D rho_jko(n, rho_fv.v);
    // Species drives as potentials: U1 = -D1' so D1 = -ux x; species 2 idles.
    std::vector<double> D1(n), D2(n, 0.0);
    for (int i = 0; i < n; ++i) D1[i] = -cfg.velocity.ux * g.xc(i);

    ScalarField p_prev(g.cells());
    double t = 0.0;
    std::printf("%6s %10s %10s %14s %12s %12s\n", "step", "t", "tau", "objective", "pg_norm",
                "L1_gap");
    for (int k = 1; k <= steps; ++k) {
        ScalarField rhs = divergence_upwind(rho_fv, U, g);
        ScalarField p = solve_pressure(sys, rhs, cfg.solver_tol, &p_prev);
        p_prev = p;
        FaceField w = face_gradient(p, g);
        for (double& v : w.x) v = -v;
        double dt = cfl_dt(U, w, g, sp);
        rho_fv = advect_step(rho_fv, U, w, dt, g);
        t += dt;

        JkoParams jp;
        jp.tau = dt;
        JkoResult res = jko_step(rho_jko, D1, D2, jp);
        rho_jko = res.rho1;

        double gap = 0.0;
        for (int i = 0; i < n; ++i) gap += std::abs(rho_fv[i] - rho_jko.v[i]) / n;
        std::printf("%6d %10.5g %10.4g %14.8g %12.3e %12.6e\n", k, t, dt, res.objective,
                    res.pg_norm, gap);

        if (!ov.out.empty()) {
            OutputSpec os;
            os.dir = ov.out;
            std::filesystem::create_directories(os.dir);
            ScalarField jf(n);
            jf.v = rho_jko.v;
            write_field_csv(os.dir + "/jko_rho_" + std::to_string(k) + ".csv", jf, g);
            write_field_csv(os.dir + "/fv_rho_" + std::to_string(k) + ".csv", rho_fv, g);
        }
    }
    return 0;
}

int cmd_scenarios(const std::string& action, const std::string& name) {
    if (action == "list") {
        for (const auto& n : builtin_scenario_names()) std::printf("%s\n", n.c_str());
        return 0;
    }
    if (action == "emit") {
        if (name.empty()) throw ConfigError("scenarios emit needs a scenario name");
        std::printf("%s", emit_scenario(builtin_scenario(name)).c_str());
        return 0;
    }
    throw ConfigError("scenarios action must be list or emit");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"congestion-constrained transport solver"};
    app.require_subcommand(1);

    std::string scenario, out, resolution;
    unsigned long long seed = 0;
    bool seed_set = false;
    int jko_steps = 10;
    std::string sc_action, sc_name;

    auto add_common = [&](CLI::App* sub, bool with_seed) {
        sub->add_option("scenario", scenario, "built-in name or config file path")->required();
        sub->add_option("--out", out, "output directory (overrides config)");
        sub->add_option("--resolution", resolution, "NX or NX,NY grid override");
        if (with_seed)
            sub->add_option("--seed", seed, "RNG seed override")->each([&](const std::string&) {
                seed_set = true;
            });
    };

    CLI::App* c_run = app.add_subcommand("run", "execute a scenario");
    add_common(c_run, true);
    CLI::App* c_oracle = app.add_subcommand("oracle1d", "compare a 1D run to the exact solution");
    add_common(c_oracle, false);
    CLI::App* c_jko = app.add_subcommand("jko", "run JKO stepper and FV solver side by side");
    add_common(c_jko, false);
    c_jko->add_option("--steps", jko_steps, "number of matched steps")->check(CLI::PositiveNumber);
    CLI::App* c_sc = app.add_subcommand("scenarios", "list or emit built-in scenarios");
    c_sc->add_option("action", sc_action, "list | emit")->required();
    c_sc->add_option("name", sc_name, "scenario name for emit");

    CLI11_PARSE(app, argc, argv);

    Overrides ov;
    ov.out = out;
    ov.resolution = resolution;
    if (seed_set) ov.seed = seed;

    try {
        if (c_run->parsed()) return cmd_run(scenario, ov);
        if (c_oracle->parsed()) return cmd_oracle1d(scenario, ov);
        if (c_jko->parsed()) return cmd_jko(scenario, ov, jko_steps);
        if (c_sc->parsed()) return cmd_scenarios(sc_action, sc_name);
    } catch (const satmix::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const satmix::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    }
    return 0;
}
