#include "satmix/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>

namespace satmix {

namespace {

double fluid_mean(const std::vector<double>& v, const Grid& g) {
    double s = 0.0;
    for (int c = 0; c < g.cells(); ++c)
        if (g.is_fluid(c)) s += v[c];
    return s / g.fluid_count;
}

void subtract_fluid_mean(std::vector<double>& v, const Grid& g) {
    double m = fluid_mean(v, g);
    for (int c = 0; c < g.cells(); ++c)
        if (g.is_fluid(c)) v[c] -= m;
}

// Dense Gaussian elimination with partial pivoting; a is n x n row-major and
// is destroyed. Solves in place into b.
void dense_solve(std::vector<double>& a, std::vector<double>& b, int n) {
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a[k * n + k]);
        for (int r = k + 1; r < n; ++r) {
            double m = std::fabs(a[r * n + k]);
            if (m > best) {
                best = m;
                piv = r;
            }
        }
        if (best == 0.0) throw NumericalError("poisson: singular dense system");
        if (piv != k) {
            for (int c = k; c < n; ++c) std::swap(a[k * n + c], a[piv * n + c]);
            std::swap(b[k], b[piv]);
        }
        double inv = 1.0 / a[k * n + k];
        for (int r = k + 1; r < n; ++r) {
            double f = a[r * n + k] * inv;
            if (f == 0.0) continue;
            for (int c = k; c < n; ++c) a[r * n + c] -= f * a[k * n + c];
            b[r] -= f * b[k];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
        b[r] = s / a[r * n + r];
    }
}

// LU with partial pivoting for the coarsest multigrid level; factors are
// stored so every V-cycle reuses them.
void lu_factor(std::vector<double>& a, std::vector<int>& piv, int n) {
    piv.resize(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::fabs(a[k * n + k]);
        for (int r = k + 1; r < n; ++r) {
            double m = std::fabs(a[r * n + k]);
            if (m > best) {
                best = m;
                p = r;
            }
        }
        if (best == 0.0) throw NumericalError("poisson: singular coarse system");
        piv[k] = p;
        if (p != k)
            for (int c = 0; c < n; ++c) std::swap(a[k * n + c], a[p * n + c]);
        double inv = 1.0 / a[k * n + k];
        for (int r = k + 1; r < n; ++r) {
            double f = (a[r * n + k] *= inv);
            if (f != 0.0)
                for (int c = k + 1; c < n; ++c) a[r * n + c] -= f * a[k * n + c];
        }
    }
}

void lu_solve(const std::vector<double>& a, const std::vector<int>& piv, int n,
              std::vector<double>& b) {
    for (int k = 0; k < n; ++k) {
        if (piv[k] != k) std::swap(b[k], b[piv[k]]);
        double bk = b[k];
        if (bk != 0.0)
            for (int r = k + 1; r < n; ++r) b[r] -= a[r * n + k] * bk;
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
        b[r] = s / a[r * n + r];
    }
}

struct MgLevel {
    int nx = 0, ny = 0;
    bool per_x = false, per_y = false;
    std::vector<std::uint8_t> fluid;
    std::vector<double> diag;   // of M = -Lap_h, positive on fluid
    std::vector<double> invd;   // 1/diag on fluid, 0 elsewhere
    std::vector<int> nbr;       // 4 per cell; inactive slots point at the cell
    std::vector<double> coef;   // matching off-diagonals of M, 0 when inactive
    std::vector<int> parent;    // cell -> coarse cell on the next level
    std::vector<double> e, r, t;  // cycle scratch
};

}  // namespace

struct MgHierarchy {
    std::vector<MgLevel> levels;
    // coarsest dense LU of M, mean-augmented when the system is singular
    int m = 0;
    std::vector<double> lu;
    std::vector<int> piv;
    std::vector<int> back;  // dense index -> coarsest cell
    std::vector<int> id;    // coarsest cell -> dense index, -1 solid
    std::vector<double> xb;
};

namespace {

std::shared_ptr<MgHierarchy> build_mg(const LinearSystem& sys) {
    const Grid& g = *sys.g;
    auto h = std::make_shared<MgHierarchy>();

    MgLevel top;
    top.nx = g.nx;
    top.ny = g.ny;
    top.per_x = g.periodic_x();
    top.per_y = g.periodic_y();
    top.fluid.resize(g.cells());
    top.diag.assign(g.cells(), 0.0);
    top.nbr.assign(4 * g.cells(), -1);
    top.coef.assign(4 * g.cells(), 0.0);
    for (int c = 0; c < g.cells(); ++c) {
        top.fluid[c] = g.is_fluid(c) ? 1 : 0;
        if (!top.fluid[c]) continue;
        top.diag[c] = -sys.diag[c];
        for (int s = 0; s < 4; ++s) {
            int nb = sys.nbr[4 * c + s];
            if (nb < 0) continue;
            top.nbr[4 * c + s] = nb;
            top.coef[4 * c + s] = -sys.nbr_coef[4 * c + s];
        }
    }
    h->levels.push_back(std::move(top));

    while (true) {
        MgLevel& f = h->levels.back();
        int nf = 0;
        for (auto u : f.fluid) nf += u;
        if (nf <= 400) break;
        int nxc = std::max(1, f.nx / 2), nyc = std::max(1, f.ny / 2);
        if (nxc == f.nx && nyc == f.ny) break;

        MgLevel c;
        c.nx = nxc;
        c.ny = nyc;
        c.per_x = f.per_x;
        c.per_y = f.per_y;
        c.fluid.assign(nxc * nyc, 0);
        c.diag.assign(nxc * nyc, 0.0);
        c.nbr.assign(4 * nxc * nyc, -1);
        c.coef.assign(4 * nxc * nyc, 0.0);
        f.parent.assign(f.nx * f.ny, -1);
        for (int j = 0; j < f.ny; ++j)
            for (int i = 0; i < f.nx; ++i) {
                int fc = j * f.nx + i;
                // odd trailing rows/columns fold into the last coarse cell
                int cc = std::min(j / 2, nyc - 1) * nxc + std::min(i / 2, nxc - 1);
                f.parent[fc] = cc;
                if (f.fluid[fc]) c.fluid[cc] = 1;
            }
        // Galerkin product with piecewise-constant transfers: every coarse
        // entry is the sum of the fine entries it covers, so the coarse
        // operator stays a 4-neighbor stencil (wrap faces may share a slot
        // with the interior face toward the same neighbor; summing is right).
        for (int fc = 0; fc < f.nx * f.ny; ++fc) {
            if (!f.fluid[fc]) continue;
            int cc = f.parent[fc];
            c.diag[cc] += f.diag[fc];
            for (int s = 0; s < 4; ++s) {
                int fn = f.nbr[4 * fc + s];
                if (fn < 0) continue;
                int cn = f.parent[fn];
                if (cn == cc) {
                    c.diag[cc] += f.coef[4 * fc + s];
                    continue;
                }
                int Ic = cc % nxc, Jc = cc / nxc, In = cn % nxc, Jn = cn / nxc;
                int slot;
                if (Jn == Jc)
                    slot = (In == Ic - 1 || (Ic == 0 && In == nxc - 1 && c.per_x)) ? 0 : 1;
                else
                    slot = (Jn == Jc - 1 || (Jc == 0 && Jn == nyc - 1 && c.per_y)) ? 2 : 3;
                c.nbr[4 * cc + slot] = cn;
                c.coef[4 * cc + slot] += f.coef[4 * fc + s];
            }
        }
        h->levels.push_back(std::move(c));
    }

    MgLevel& bot = h->levels.back();
    const int nb = bot.nx * bot.ny;
    h->id.assign(nb, -1);
    for (int c = 0; c < nb; ++c)
        if (bot.fluid[c]) {
            h->id[c] = h->m++;
            h->back.push_back(c);
        }
    const int m = h->m;
    h->lu.assign(static_cast<size_t>(m) * m, 0.0);
    for (int c = 0; c < nb; ++c) {
        if (h->id[c] < 0) continue;
        size_t row = static_cast<size_t>(h->id[c]) * m;
        h->lu[row + h->id[c]] = bot.diag[c];
        for (int s = 0; s < 4; ++s)
            if (bot.nbr[4 * c + s] >= 0) h->lu[row + h->id[bot.nbr[4 * c + s]]] += bot.coef[4 * c + s];
    }
    if (sys.nullspace_constants) {
        const double aug = 1.0 / m;
        for (double& e : h->lu) e += aug;
    }
    lu_factor(h->lu, h->piv, m);
    h->xb.resize(m);
    for (MgLevel& L : h->levels) {
        const int nl = L.nx * L.ny;
        L.invd.assign(nl, 0.0);
        for (int c = 0; c < nl; ++c) {
            if (L.fluid[c]) L.invd[c] = 1.0 / L.diag[c];
            // self-pointing inactive slots keep the stencil loops branch-free
            for (int s = 0; s < 4; ++s)
                if (L.nbr[4 * c + s] < 0) L.nbr[4 * c + s] = c;
        }
        L.e.assign(nl, 0.0);
        L.r.assign(nl, 0.0);
        L.t.assign(nl, 0.0);
    }
    return h;
}

// Damped-Jacobi weight and coarse-correction over-relaxation. Summed
// restriction with injected prolongation is only first order, which leaves the
// coarse update systematically short; relaxing it by ~1.8 restores most of the
// lost contraction while keeping the cycle symmetric (the factor is constant).
constexpr double kSmootherOmega = 0.8;
constexpr double kCorrection = 1.95;

// V(2,2) cycle; solves M e = r approximately, reading levels[lvl].r and
// leaving the result in levels[lvl].e.
void mg_cycle(MgHierarchy& h, size_t lvl) {
    MgLevel& L = h.levels[lvl];
    const int n = L.nx * L.ny;
    if (lvl + 1 == h.levels.size()) {
        for (int k = 0; k < h.m; ++k) h.xb[k] = L.r[h.back[k]];
        lu_solve(h.lu, h.piv, h.m, h.xb);
        std::fill(L.e.begin(), L.e.end(), 0.0);
        for (int k = 0; k < h.m; ++k) L.e[h.back[k]] = h.xb[k];
        return;
    }
    auto mdote = [&](int c) {
        return L.diag[c] * L.e[c] + L.coef[4 * c] * L.e[L.nbr[4 * c]] +
               L.coef[4 * c + 1] * L.e[L.nbr[4 * c + 1]] +
               L.coef[4 * c + 2] * L.e[L.nbr[4 * c + 2]] +
               L.coef[4 * c + 3] * L.e[L.nbr[4 * c + 3]];
    };
    auto sweep = [&]() {  // one Jacobi sweep, double-buffered through t
        for (int c = 0; c < n; ++c)
            if (L.fluid[c]) L.t[c] = L.e[c] + kSmootherOmega * (L.r[c] - mdote(c)) * L.invd[c];
        L.e.swap(L.t);
    };
    // two pre-sweeps; the first starts from zero, so it is a plain scaling
    for (int c = 0; c < n; ++c) L.e[c] = kSmootherOmega * L.r[c] * L.invd[c];
    sweep();
    MgLevel& C = h.levels[lvl + 1];
    std::fill(C.r.begin(), C.r.end(), 0.0);
    for (int c = 0; c < n; ++c)
        if (L.fluid[c]) C.r[L.parent[c]] += L.r[c] - mdote(c);
    mg_cycle(h, lvl + 1);
    for (int c = 0; c < n; ++c)
        if (L.fluid[c]) L.e[c] += kCorrection * C.e[L.parent[c]];
    sweep();
    sweep();
}

}  // namespace

ScalarField LinearSystem::apply(const ScalarField& p) const {
    ScalarField out(*g);
    const int n = g->cells();
    for (int c = 0; c < n; ++c) {
        if (!g->is_fluid(c)) continue;
        double s = diag[c] * p[c];
        for (int k = 0; k < 4; ++k) {
            int nb = nbr[4 * c + k];
            if (nb >= 0) s += nbr_coef[4 * c + k] * p[nb];
        }
        out[c] = s;
    }
    return out;
}

LinearSystem assemble_laplacian(const Grid& g, const BCSpec& bc) {
    switch (bc.kind) {
        case PressureBc::dirichlet_left_1d:
            if (!g.one_dimensional() || g.periodic_x())
                throw ConfigError("poisson: dirichlet_left_1d needs a walled 1D grid");
            break;
        case PressureBc::periodic:
            if (!g.periodic_x() || (g.ny > 1 && !g.periodic_y()))
                throw ConfigError("poisson: periodic kind needs periodic tags");
            break;
        case PressureBc::neumann_walls:
            break;
    }

    LinearSystem sys;
    sys.g = &g;
    sys.bc = bc;
    sys.nullspace_constants = bc.kind != PressureBc::dirichlet_left_1d;
    sys.diag.assign(g.cells(), 0.0);
    sys.nbr.assign(4 * g.cells(), -1);
    sys.nbr_coef.assign(4 * g.cells(), 0.0);

    const double cx = 1.0 / (g.dx * g.dx);
    const double cy = 1.0 / (g.dy * g.dy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            int c = g.cell(i, j);
            if (!g.is_fluid(c)) continue;
            auto add = [&](int slot, const FacePair& f, double coef) {
                if (!f.active) return;
                int other = (f.cm == c) ? f.cp : f.cm;
                if (other == c) return;  // degenerate self-wrap face
                sys.nbr[4 * c + slot] = other;
                sys.nbr_coef[4 * c + slot] = coef;
                sys.diag[c] -= coef;
            };
            add(0, xface_cells(g, i, j), cx);
            add(1, xface_cells(g, i + 1, j), cx);
            add(2, yface_cells(g, i, j), cy);
            add(3, yface_cells(g, i, j + 1), cy);
            if (bc.kind == PressureBc::dirichlet_left_1d && i == 0) {
                // ghost reflection across the left wall pins p(0) = 0
                sys.diag[c] -= 2.0 * cx;
            }
        }
    }
    return sys;
}

ScalarField solve_pressure(const LinearSystem& sys, const ScalarField& rhs,
                           double tol, const ScalarField* initial_guess,
                           int* iterations_out) {
    const Grid& g = *sys.g;
    const int n = g.cells();
    if (rhs.size() != n) throw ConfigError("poisson: rhs size mismatch");

    // Fold prescribed wall co-normal derivatives into the right-hand side.
    std::vector<double> b(rhs.v);
    double bdata_norm1 = 0.0;
    if (sys.bc.neumann_data) {
        const FaceField& nd = *sys.bc.neumann_data;
        if (!g.periodic_x()) {
            for (int j = 0; j < g.ny; ++j) {
                if (g.is_fluid(0, j)) {
                    b[g.cell(0, j)] += nd.xf(0, j) / g.dx;
                    bdata_norm1 += std::fabs(nd.xf(0, j)) * g.dy;
                }
                if (g.is_fluid(g.nx - 1, j)) {
                    b[g.cell(g.nx - 1, j)] -= nd.xf(g.nx, j) / g.dx;
                    bdata_norm1 += std::fabs(nd.xf(g.nx, j)) * g.dy;
                }
            }
        }
        if (!g.periodic_y() && g.ny > 1) {
            for (int i = 0; i < g.nx; ++i) {
                if (g.is_fluid(i, 0)) {
                    b[g.cell(i, 0)] += nd.yf(i, 0) / g.dy;
                    bdata_norm1 += std::fabs(nd.yf(i, 0)) * g.dx;
                }
                if (g.is_fluid(i, g.ny - 1)) {
                    b[g.cell(i, g.ny - 1)] -= nd.yf(i, g.ny) / g.dy;
                    bdata_norm1 += std::fabs(nd.yf(i, g.ny)) * g.dx;
                }
            }
        }
    }
    for (int c = 0; c < n; ++c)
        if (!g.is_fluid(c)) b[c] = 0.0;

    double rhs_maxabs = 0.0, rhs_norm1 = 0.0;
    for (int c = 0; c < n; ++c) {
        if (!g.is_fluid(c)) continue;
        rhs_maxabs = std::max(rhs_maxabs, std::fabs(rhs[c]));
        rhs_norm1 += std::fabs(rhs[c]) * g.cell_volume();
    }

    if (sys.nullspace_constants) {
        double defect = 0.0;
        for (int c = 0; c < n; ++c)
            if (g.is_fluid(c)) defect += b[c] * g.cell_volume();
        double thresh = 1e-10 * (rhs_norm1 + bdata_norm1) + 1e-14;
        if (std::fabs(defect) > thresh)
            throw IncompatibleRhs("poisson: rhs incompatible with closed boundary, defect " +
                                  std::to_string(defect));
        subtract_fluid_mean(b, g);
    }

    const double target = tol * std::max(1.0, rhs_maxabs);
    ScalarField p(g);

    if (g.fluid_count < 400) {
        // Direct dense elimination on -Lap (augmented by the rank-one mean
        // term when the system is singular).
        std::vector<int> id(n, -1);
        std::vector<int> back(g.fluid_count);
        int k = 0;
        for (int c = 0; c < n; ++c)
            if (g.is_fluid(c)) {
                id[c] = k;
                back[k] = c;
                ++k;
            }
        const int m = g.fluid_count;
        std::vector<double> a(static_cast<size_t>(m) * m, 0.0);
        for (int c = 0; c < n; ++c) {
            if (id[c] < 0) continue;
            a[static_cast<size_t>(id[c]) * m + id[c]] = -sys.diag[c];
            for (int s = 0; s < 4; ++s) {
                int nb = sys.nbr[4 * c + s];
                if (nb >= 0) a[static_cast<size_t>(id[c]) * m + id[nb]] -= sys.nbr_coef[4 * c + s];
            }
        }
        if (sys.nullspace_constants) {
            const double aug = 1.0 / m;
            for (size_t e = 0; e < a.size(); ++e) a[e] += aug;
        }
        std::vector<double> rb(m);
        for (int r = 0; r < m; ++r) rb[r] = -b[back[r]];
        dense_solve(a, rb, m);
        for (int r = 0; r < m; ++r) p[back[r]] = rb[r];
        if (sys.nullspace_constants) subtract_fluid_mean(p.v, g);
        if (iterations_out) *iterations_out = 0;
        return p;
    }

    // Jacobi-preconditioned CG on -Lap.
    if (initial_guess && initial_guess->size() == n) {
        p.v = initial_guess->v;
        for (int c = 0; c < n; ++c)
            if (!g.is_fluid(c)) p[c] = 0.0;
        if (sys.nullspace_constants) subtract_fluid_mean(p.v, g);
    }

    std::vector<double> r(n, 0.0), z(n, 0.0), q(n, 0.0), d(n, 0.0);
    auto apply_neg = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (int c = 0; c < n; ++c) {
            if (!g.is_fluid(c)) {
                out[c] = 0.0;
                continue;
            }
            double s = sys.diag[c] * x[c];
            for (int s4 = 0; s4 < 4; ++s4) {
                int nb = sys.nbr[4 * c + s4];
                if (nb >= 0) s += sys.nbr_coef[4 * c + s4] * x[nb];
            }
            out[c] = -s;
        }
    };

    apply_neg(p.v, q);
    double rmax = 0.0;
    for (int c = 0; c < n; ++c) {
        r[c] = g.is_fluid(c) ? (-b[c] - q[c]) : 0.0;
        rmax = std::max(rmax, std::fabs(r[c]));
    }

    const long max_iters = 200000;
    long it = 0;
    double rz_old = 0.0;
    while (rmax > target) {
        if (it >= max_iters)
            throw NoConvergence("poisson: conjugate gradient stalled", rmax, it);
        if (!sys.mg) sys.mg = build_mg(sys);
        sys.mg->levels[0].r = r;
        mg_cycle(*sys.mg, 0);
        z = sys.mg->levels[0].e;
        if (sys.nullspace_constants) subtract_fluid_mean(z, g);
        double rz = 0.0;
        for (int c = 0; c < n; ++c) rz += r[c] * z[c];
        if (it == 0) {
            d = z;
        } else {
            double beta = rz / rz_old;
            for (int c = 0; c < n; ++c) d[c] = z[c] + beta * d[c];
        }
        rz_old = rz;
        apply_neg(d, q);
        double dq = 0.0;
        for (int c = 0; c < n; ++c) dq += d[c] * q[c];
        if (dq <= 0.0)
            throw NoConvergence("poisson: indefinite search direction", rmax, it);
        double alpha = rz / dq;
        rmax = 0.0;
        for (int c = 0; c < n; ++c) {
            p.v[c] += alpha * d[c];
            r[c] -= alpha * q[c];
            rmax = std::max(rmax, std::fabs(r[c]));
        }
        ++it;
    }
    if (sys.nullspace_constants) subtract_fluid_mean(p.v, g);
    for (int c = 0; c < n; ++c)
        if (!g.is_fluid(c)) p[c] = 0.0;
    if (iterations_out) *iterations_out = static_cast<int>(it);
    return p;
}

ScalarField solve_chemoattractant(const LinearSystem& sys, const ScalarField& rho,
                                  double tol, const ScalarField* initial_guess) {
    const Grid& g = *sys.g;
    ScalarField rhs(g);
    double mean = 0.0;
    for (int c = 0; c < g.cells(); ++c)
        if (g.is_fluid(c)) mean += rho[c];
    mean /= g.fluid_count;
    for (int c = 0; c < g.cells(); ++c)
        if (g.is_fluid(c)) rhs[c] = -(rho[c] - mean);
    return solve_pressure(sys, rhs, tol, initial_guess);
}

ScalarField solve_chemoattractant(const Grid& g, const ScalarField& rho,
                                  double tol, const ScalarField* initial_guess) {
    BCSpec bc;
    bc.kind = (g.periodic_x() && (g.ny == 1 || g.periodic_y()))
                  ? PressureBc::periodic
                  : PressureBc::neumann_walls;
    LinearSystem sys = assemble_laplacian(g, bc);
    return solve_chemoattractant(sys, rho, tol, initial_guess);
}

}  // namespace satmix
