#include "satmix/grid.hpp"

#include <cmath>
#include <queue>
#include <string>

namespace satmix {

double FaceField::max_abs() const {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    for (double v : y) m = std::max(m, std::fabs(v));
    return m;
}

FacePair xface_cells(const Grid& g, int i, int j) {
    FacePair f;
    int im = i - 1, ip = i;
    if (i == 0) {
        if (!g.periodic_x()) return f;
        im = g.nx - 1;
    } else if (i == g.nx) {
        if (!g.periodic_x()) return f;
        ip = 0;
    }
    f.cm = g.cell(im, j);
    f.cp = g.cell(ip, j);
    f.active = g.is_fluid(f.cm) && g.is_fluid(f.cp);
    return f;
}

FacePair yface_cells(const Grid& g, int i, int j) {
    FacePair f;
    int jm = j - 1, jp = j;
    if (j == 0) {
        if (!g.periodic_y()) return f;
        jm = g.ny - 1;
    } else if (j == g.ny) {
        if (!g.periodic_y()) return f;
        jp = 0;
    }
    f.cm = g.cell(i, jm);
    f.cp = g.cell(i, jp);
    f.active = g.is_fluid(f.cm) && g.is_fluid(f.cp);
    return f;
}

namespace {

// 4-neighbor flood fill over fluid cells, wrapping on periodic axes.
int count_reachable(const Grid& g, int start) {
    std::vector<std::uint8_t> seen(g.cells(), 0);
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    int n = 1;
    while (!q.empty()) {
        int c = q.front();
        q.pop();
        int i = c % g.nx, j = c / g.nx;
        auto visit = [&](int ci, int cj) {
            int nc = g.cell(ci, cj);
            if (!seen[nc] && g.is_fluid(nc)) {
                seen[nc] = 1;
                ++n;
                q.push(nc);
            }
        };
        if (i > 0) visit(i - 1, j);
        else if (g.periodic_x()) visit(g.nx - 1, j);
        if (i < g.nx - 1) visit(i + 1, j);
        else if (g.periodic_x()) visit(0, j);
        if (j > 0) visit(i, j - 1);
        else if (g.periodic_y()) visit(i, g.ny - 1);
        if (j < g.ny - 1) visit(i, j + 1);
        else if (g.periodic_y()) visit(i, 0);
    }
    return n;
}

}  // namespace

Grid build_grid(int nx, int ny, AxisBc bc_x, AxisBc bc_y,
                const std::vector<MaskRect>& mask) {
    if (nx < 3) throw ConfigError("grid: nx must be >= 3, got " + std::to_string(nx));
    if (ny < 1) throw ConfigError("grid: ny must be >= 1, got " + std::to_string(ny));
    for (const MaskRect& r : mask) {
        if (!(r.x1 >= r.x0) || !(r.y1 >= r.y0))
            throw ConfigError("grid: degenerate mask rectangle");
        if (r.x0 < 0.0 || r.x1 > 1.0 || r.y0 < 0.0 || r.y1 > 1.0)
            throw ConfigError("grid: mask rectangle outside the unit square");
    }

    Grid g;
    g.nx = nx;
    g.ny = ny;
    g.dx = 1.0 / nx;
    g.dy = 1.0 / ny;
    g.bc_x = bc_x;
    g.bc_y = bc_y;
    g.solid.assign(nx * ny, 0);

    int first_fluid = -1;
    g.fluid_count = 0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            bool inside = false;
            for (const MaskRect& r : mask) {
                if (r.contains(g.xc(i), g.yc(j))) {
                    inside = true;
                    break;
                }
            }
            if (inside) {
                g.solid[g.cell(i, j)] = 1;
            } else {
                ++g.fluid_count;
                if (first_fluid < 0) first_fluid = g.cell(i, j);
            }
        }
    }

    if (g.fluid_count == 0) throw ConfigError("grid: mask leaves no fluid cells");
    if (g.fluid_count == 1) throw ConfigError("grid: single isolated fluid cell");
    if (count_reachable(g, first_fluid) != g.fluid_count)
        throw ConfigError("grid: fluid region is disconnected");
    return g;
}

double total_mass(const ScalarField& rho, const Grid& g) {
    double s = 0.0;
    for (int c = 0; c < g.cells(); ++c)
        if (g.is_fluid(c)) s += rho[c];
    return s * g.cell_volume();
}

}  // namespace satmix
