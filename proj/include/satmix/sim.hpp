#pragma once

#include <optional>
#include <string>
#include <vector>

#include "satmix/grid.hpp"
#include "satmix/poisson.hpp"
#include "satmix/transport.hpp"
#include "satmix/velocity.hpp"

namespace satmix {

enum class InitKind { indicators, bernoulli, array };

struct IndicatorTerm {
    MaskRect rect;
    double value = 1.0;
};

struct InitSpec {
    InitKind kind = InitKind::indicators;
    std::vector<IndicatorTerm> terms;       // indicators: summed coefficients
    double q = 0.5;                         // bernoulli
    unsigned long long seed = 1234;         // bernoulli
    std::vector<double> values;             // array, row-major nx*ny
};

// Resolution-independent velocity description; resolved against the grid in
// run(). target_right_wall marks the rightmost fluid column as the target.
struct VelocityConfig {
    VelocityKind kind = VelocityKind::constant_vector;
    double ux = 0.0, uy = 0.0;
    std::vector<double> potential;
    bool target_right_wall = false;
    std::vector<MaskRect> target_rects;
};

enum class PressureBcChoice { automatic, dirichlet_left_1d, neumann_walls, periodic };

enum class SimMode { single_active, two_species_experimental };

struct OutputSpec {
    std::string dir;
    bool csv = true;
    bool pgm = false;
};

struct ScenarioConfig {
    std::string name;
    int nx = 0, ny = 1;
    std::vector<MaskRect> mask;
    AxisBc bc_x = AxisBc::wall, bc_y = AxisBc::wall;
    PressureBcChoice pressure_bc = PressureBcChoice::automatic;
    VelocityConfig velocity;
    InitSpec init;
    SimMode mode = SimMode::single_active;
    VelocityConfig velocity2;  // second species drive, two-species mode only
    double cfl_safety = 0.45;
    std::optional<double> dt_cap;
    double t_end = 1.0;
    double snapshot_dt = 0.25;
    double solver_tol = 1e-10;
    OutputSpec output;
};

struct Snapshot {
    double t = 0.0;
    long step = 0;
    double dt = 0.0;  // step size that landed on this snapshot, 0 initially
    ScalarField rho1;
    std::optional<ScalarField> rho2;
    ScalarField p;
    double mass1 = 0.0, mass2 = 0.0;
    double rho_min = 0.0, rho_max = 0.0;
    double w_inf = 0.0;
    int saturated_components = 0;
};

struct Trajectory {
    Grid grid;
    std::vector<Snapshot> snapshots;
    std::vector<double> dt_history;
    long steps = 0;
    long solver_iterations = 0;  // pressure-solver iterations summed over steps
    bool steady_detected = false;
    double final_time = 0.0;
    std::vector<std::string> warnings;
};

// Independent Bernoulli(q) draw per fluid cell in row-major order from a
// fixed-recipe mt19937_64 stream; bit-identical across platforms.
ScalarField bernoulli_init(const Grid& g, double q, unsigned long long seed);

// Initial density field; indicator terms use exact area fractions.
ScalarField init_field(const InitSpec& init, const Grid& g);

// Count of 4-connected components of { rho >= thresh }, wrapping across
// periodic boundaries.
int saturated_components(const ScalarField& rho, const Grid& g, double thresh = 0.99);

// 4 pi area / perimeter^2 of { rho >= thresh }; reported diagnostic only.
double isoperimetric_ratio(const ScalarField& rho, const Grid& g, double thresh = 0.99);

PressureBc resolve_pressure_bc(const ScenarioConfig& cfg, const Grid& g);
PotentialSpec resolve_velocity(const VelocityConfig& vc, const Grid& g);

// Deterministic forward run: per step the desired velocity (re-solved only
// for chemotaxis), the pressure correction, a CFL step capped to land exactly
// on snapshot times and t_end, then the split upwind advection. Terminates at
// t_end or when ||rho^{n+1} - rho^n||_1 / dt <= 1e-12 holds on three
// consecutive steps. Identical config and seed give bit-identical output.
Trajectory run(const ScenarioConfig& cfg);

// Two-species variant (also reached via run() on mode): one shared
// correction from the summed upwind divergences, each species advected by
// its own drive plus the shared w; rho1 + rho2 = 1 drift is tracked and
// reported, never corrected.
Trajectory run_two_species(const ScenarioConfig& cfg);

}  // namespace satmix
