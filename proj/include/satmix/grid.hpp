#pragma once

#include <cstdint>
#include <vector>

#include "satmix/errors.hpp"

namespace satmix {

enum class AxisBc { wall, periodic };

// Axis-aligned rectangle in domain units, [x0,x1] x [y0,y1].
struct MaskRect {
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    bool contains(double x, double y) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1;
    }
};

// Uniform Cartesian grid on the unit square with optional solid cells.
// 1D problems use ny = 1 (dy = 1, cell volume dx).
struct Grid {
    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;
    AxisBc bc_x = AxisBc::wall;
    AxisBc bc_y = AxisBc::wall;
    std::vector<std::uint8_t> solid;  // 1 = solid, size nx*ny, row-major

    int fluid_count = 0;

    int cell(int i, int j) const { return j * nx + i; }
    bool is_fluid(int i, int j) const { return solid[cell(i, j)] == 0; }
    bool is_fluid(int c) const { return solid[c] == 0; }
    double xc(int i) const { return (i + 0.5) * dx; }
    double yc(int j) const { return (j + 0.5) * dy; }
    bool periodic_x() const { return bc_x == AxisBc::periodic; }
    bool periodic_y() const { return bc_y == AxisBc::periodic; }
    int cells() const { return nx * ny; }
    double cell_volume() const { return dx * dy; }
    bool one_dimensional() const { return ny == 1; }
};

// Cell-centered scalar values. Solid cells always hold 0.
struct ScalarField {
    std::vector<double> v;
    ScalarField() = default;
    explicit ScalarField(int n, double fill = 0.0) : v(n, fill) {}
    explicit ScalarField(const Grid& g, double fill = 0.0) : v(g.cells(), fill) {}
    double& operator[](int c) { return v[c]; }
    double operator[](int c) const { return v[c]; }
    int size() const { return static_cast<int>(v.size()); }
};

// Face-normal velocity components. x faces: (nx+1) x ny, y faces: nx x (ny+1).
// Faces between fluid and solid cells, and wall boundary faces, carry 0.
// On periodic axes the wrap face is stored at both ends with equal values.
struct FaceField {
    int nx = 0, ny = 0;
    std::vector<double> x, y;
    FaceField() = default;
    explicit FaceField(const Grid& g)
        : nx(g.nx), ny(g.ny), x((g.nx + 1) * g.ny, 0.0), y(g.nx * (g.ny + 1), 0.0) {}
    double& xf(int i, int j) { return x[j * (nx + 1) + i]; }
    double xf(int i, int j) const { return x[j * (nx + 1) + i]; }
    double& yf(int i, int j) { return y[j * nx + i]; }
    double yf(int i, int j) const { return y[j * nx + i]; }
    double max_abs() const;
};

// Cells straddling a face, resolved through periodic wrap; active means both
// sides are fluid and the face is not a wall boundary.
struct FacePair {
    int cm = -1, cp = -1;
    bool active = false;
};

FacePair xface_cells(const Grid& g, int i, int j);
FacePair yface_cells(const Grid& g, int i, int j);

// Builds a grid over the unit square. Cells whose centers fall inside any
// mask rectangle become solid. Throws ConfigError for empty or disconnected
// fluid regions (connectivity is 4-neighbor, wrapping on periodic axes).
Grid build_grid(int nx, int ny, AxisBc bc_x, AxisBc bc_y,
                const std::vector<MaskRect>& mask);

// Sum of rho over fluid cells weighted by cell volume.
double total_mass(const ScalarField& rho, const Grid& g);

}  // namespace satmix
