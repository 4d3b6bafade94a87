#pragma once

#include <string>

#include "satmix/grid.hpp"
#include "satmix/sim.hpp"

namespace satmix {

// Comma-separated, ny rows of nx values, 17 significant digits, row j = 0
// first. Solid cells write 0.
void write_field_csv(const std::string& path, const ScalarField& f, const Grid& g);

// Binary P5, 8-bit, linear [0,1] -> [255,0] so congestion renders dark.
// Top image row is the j = ny-1 cell row.
void write_field_pgm(const std::string& path, const ScalarField& f, const Grid& g);

// One row per snapshot: time, dt, mass1, mass2, min, max, winf, components.
void write_diag_csv(const std::string& path, const Trajectory& traj);

// Writes rho_<step>.csv / p_<step>.csv (and rho2_<step>.csv when present)
// per snapshot, rho_<step>.pgm when requested, plus diag.csv. Creates dir.
void write_trajectory(const Trajectory& traj, const OutputSpec& out);

ScalarField read_field_csv(const std::string& path, const Grid& g);

}  // namespace satmix
