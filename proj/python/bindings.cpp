#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "satmix/exact1d.hpp"
#include "satmix/io.hpp"
#include "satmix/ot1d.hpp"
#include "satmix/scenario.hpp"
#include "satmix/sim.hpp"
#include "satmix/transport.hpp"
#include "satmix/velocity.hpp"

namespace py = pybind11;
using namespace satmix;

namespace {

py::array_t<double> field_to_numpy(const ScalarField& f, const Grid& g) {
    py::array_t<double> a({g.ny, g.nx});
    auto r = a.mutable_unchecked<2>();
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) r(j, i) = g.is_fluid(g.cell(i, j)) ? f[g.cell(i, j)] : 0.0;
    return a;
}

AxisBc bc_from(const std::string& s) {
    if (s == "wall") return AxisBc::wall;
    if (s == "periodic") return AxisBc::periodic;
    throw ConfigError("bc must be \"wall\" or \"periodic\"");
}

Density1D density_from(const std::vector<double>& v) { return Density1D((int)v.size(), v); }

PiecewiseConstant1D profile_from(const std::vector<double>& bps, const std::vector<double>& vals) {
    PiecewiseConstant1D f;
    f.breakpoints = bps;
    f.values = vals;
    validate(f);
    return f;
}

py::dict trajectory_to_dict(const Trajectory& traj) {
    py::dict d;
    py::list times, rho, rho2, p, mass1, mass2, rmin, rmax, winf, comps, dts;
    for (const auto& s : traj.snapshots) {
        times.append(s.t);
        rho.append(field_to_numpy(s.rho1, traj.grid));
        if (s.rho2) rho2.append(field_to_numpy(*s.rho2, traj.grid));
        p.append(field_to_numpy(s.p, traj.grid));
        mass1.append(s.mass1);
        mass2.append(s.mass2);
        rmin.append(s.rho_min);
        rmax.append(s.rho_max);
        winf.append(s.w_inf);
        comps.append(s.saturated_components);
        dts.append(s.dt);
    }
    d["times"] = times;
    d["rho"] = rho;
    if (py::len(rho2) > 0) d["rho2"] = rho2;
    d["p"] = p;
    d["mass1"] = mass1;
    d["mass2"] = mass2;
    d["rho_min"] = rmin;
    d["rho_max"] = rmax;
    d["w_inf"] = winf;
    d["components"] = comps;
    d["snapshot_dt"] = dts;
    d["steps"] = traj.steps;
    d["steady"] = traj.steady_detected;
    d["final_time"] = traj.final_time;
    d["warnings"] = traj.warnings;
    return d;
}

}  // namespace

PYBIND11_MODULE(pysatmix, m) {
    m.doc() = "congestion-constrained transport of saturated species mixtures";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    m.def(
        "run_scenario",
        [](const std::string& spec, const std::string& out_dir) {
            ScenarioConfig cfg =
                is_builtin_scenario(spec) ? builtin_scenario(spec) : parse_scenario(spec);
            if (!out_dir.empty()) cfg.output.dir = out_dir;
            Trajectory traj = run(cfg);
            if (!out_dir.empty()) write_trajectory(traj, cfg.output);
            return trajectory_to_dict(traj);
        },
        py::arg("spec"), py::arg("out_dir") = "",
        "Run a built-in scenario (by name) or a JSON config (as text); returns "
        "the trajectory as dict of numpy arrays.");

    m.def("builtin_scenarios", &builtin_scenario_names);
    m.def(
        "emit_scenario", [](const std::string& name) { return emit_scenario(builtin_scenario(name)); },
        py::arg("name"));

    m.def(
        "bernoulli_init",
        [](int nx, int ny, double q, unsigned long long seed, const std::string& bc_x,
           const std::string& bc_y) {
            Grid g = build_grid(nx, ny, bc_from(bc_x), bc_from(bc_y), {});
            return field_to_numpy(bernoulli_init(g, q, seed), g);
        },
        py::arg("nx"), py::arg("ny"), py::arg("q"), py::arg("seed"), py::arg("bc_x") = "wall",
        py::arg("bc_y") = "wall");

    m.def("upwind_flux", &upwind_flux, py::arg("u"), py::arg("rho_minus"), py::arg("rho_plus"),
          "Donor-cell flux through one face.");
    m.def("godunov_flux", &godunov_flux, py::arg("rho_left"), py::arg("rho_right"), py::arg("U"));

    m.def(
        "exact_entropy_solution",
        [](const std::vector<double>& bps, const std::vector<double>& vals, double U, double t,
           int n_eval, int refine) {
            return exact_entropy_solution(profile_from(bps, vals), U, t, n_eval, refine);
        },
        py::arg("breakpoints"), py::arg("values"), py::arg("U"), py::arg("t"), py::arg("n_eval"),
        py::arg("refine") = 16,
        "Cell averages of the exact entropy solution of the wall-bounded "
        "1D congestion model with constant drive U.");

    m.def(
        "steady_state_1d",
        [](const std::vector<double>& bps, const std::vector<double>& vals) {
            PiecewiseConstant1D s = steady_state_1d(profile_from(bps, vals));
            return py::make_tuple(s.breakpoints, s.values);
        },
        py::arg("breakpoints"), py::arg("values"));

    m.def(
        "quantile", [](const std::vector<double>& v, double mass) { return quantile(density_from(v), mass); },
        py::arg("density"), py::arg("mass"));
    m.def(
        "w2", [](const std::vector<double>& a, const std::vector<double>& b) {
            return w2(density_from(a), density_from(b));
        },
        py::arg("a"), py::arg("b"), "2-Wasserstein distance of equal-mass cell densities on [0,1].");
    m.def(
        "w2_squared", [](const std::vector<double>& a, const std::vector<double>& b) {
            return w2_squared(density_from(a), density_from(b));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "w2_squared_gradient", [](const std::vector<double>& a, const std::vector<double>& b) {
            return w2_squared_gradient(density_from(a), density_from(b));
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "jko_step",
        [](const std::vector<double>& prev1, const std::vector<double>& D1,
           const std::vector<double>& D2, double tau, double pg_tol, int max_iters) {
            JkoParams p;
            p.tau = tau;
            p.pg_tol = pg_tol;
            p.max_iters = max_iters;
            JkoResult r = jko_step(density_from(prev1), D1, D2, p);
            py::dict d;
            d["rho1"] = r.rho1.v;
            d["iterations"] = r.iterations;
            d["objective"] = r.objective;
            d["pg_norm"] = r.pg_norm;
            return d;
        },
        py::arg("prev1"), py::arg("D1"), py::arg("D2"), py::arg("tau"), py::arg("pg_tol") = 1e-7,
        py::arg("max_iters") = 50000,
        "One minimizing-movement step of the two-phase congestion functional.");

    m.def(
        "fast_march_distance",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> solid,
           py::array_t<double, py::array::c_style | py::array::forcecast> target,
           const std::string& bc_x, const std::string& bc_y) {
            if (solid.ndim() != 2 || target.ndim() != 2)
                throw ConfigError("solid and target must be 2D arrays");
            int ny = (int)solid.shape(0), nx = (int)solid.shape(1);
            if (target.shape(0) != ny || target.shape(1) != nx)
                throw ConfigError("solid and target shapes differ");
            Grid g = build_grid(nx, ny, bc_from(bc_x), bc_from(bc_y), {});
            auto s = solid.unchecked<2>();
            auto t = target.unchecked<2>();
            std::vector<std::uint8_t> tmask(g.cells(), 0);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    if (s(j, i) != 0.0) g.solid[g.cell(i, j)] = 1;
                    if (t(j, i) != 0.0) tmask[g.cell(i, j)] = 1;
                }
            g.fluid_count = 0;
            for (int c = 0; c < g.cells(); ++c)
                if (!g.solid[c]) ++g.fluid_count;
            ScalarField d = fast_march_distance(g, tmask);
            py::array_t<double> out({ny, nx});
            auto o = out.mutable_unchecked<2>();
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) o(j, i) = d[g.cell(i, j)];
            return out;
        },
        py::arg("solid"), py::arg("target"), py::arg("bc_x") = "wall", py::arg("bc_y") = "wall",
        "First-order eikonal distance to the target cells; solid cells carry inf.");

    m.def(
        "total_mass",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> rho) {
            if (rho.ndim() != 2) throw ConfigError("rho must be a 2D array");
            int ny = (int)rho.shape(0), nx = (int)rho.shape(1);
            Grid g = build_grid(nx, ny, AxisBc::wall, AxisBc::wall, {});
            auto r = rho.unchecked<2>();
            ScalarField f(g.cells());
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) f[g.cell(i, j)] = r(j, i);
            return total_mass(f, g);
        },
        py::arg("rho"));
}
