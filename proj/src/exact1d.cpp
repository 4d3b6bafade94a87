#include "satmix/exact1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace satmix {

void validate(const PiecewiseConstant1D& f) {
    if (f.breakpoints.size() < 2 || f.values.size() + 1 != f.breakpoints.size())
        throw ConfigError("exact1d: breakpoints/values size mismatch");
    if (f.breakpoints.front() != 0.0 || f.breakpoints.back() != 1.0)
        throw ConfigError("exact1d: breakpoints must span [0,1]");
    for (size_t k = 1; k < f.breakpoints.size(); ++k)
        if (f.breakpoints[k] < f.breakpoints[k - 1])
            throw ConfigError("exact1d: breakpoints must be sorted");
}

double pc_mass(const PiecewiseConstant1D& f) {
    double m = 0.0;
    for (size_t k = 0; k < f.values.size(); ++k)
        m += f.values[k] * (f.breakpoints[k + 1] - f.breakpoints[k]);
    return m;
}

double pc_eval(const PiecewiseConstant1D& f, double x) {
    auto it = std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), x);
    size_t k = (it == f.breakpoints.begin()) ? 0 : (it - f.breakpoints.begin() - 1);
    if (k >= f.values.size()) k = f.values.size() - 1;
    return f.values[k];
}

std::vector<double> cell_averages(const PiecewiseConstant1D& f, int n) {
    validate(f);
    if (n < 1) throw ConfigError("exact1d: cell count must be positive");
    std::vector<double> out(n, 0.0);
    const double h = 1.0 / n;
    size_t seg = 0;
    for (int i = 0; i < n; ++i) {
        const double a = i * h, b = (i + 1) * h;
        while (seg + 1 < f.values.size() && f.breakpoints[seg + 1] <= a) ++seg;
        double lo = a, acc = 0.0;
        for (size_t s = seg; s < f.values.size(); ++s) {
            double hi = std::min(b, f.breakpoints[s + 1]);
            if (hi > lo) acc += f.values[s] * (hi - lo);
            if (f.breakpoints[s + 1] >= b) break;
            lo = std::max(lo, hi);
        }
        out[i] = acc / h;
    }
    return out;
}

double l1_distance(const PiecewiseConstant1D& f, const PiecewiseConstant1D& g) {
    validate(f);
    validate(g);
    std::vector<double> pts;
    pts.reserve(f.breakpoints.size() + g.breakpoints.size());
    pts.insert(pts.end(), f.breakpoints.begin(), f.breakpoints.end());
    pts.insert(pts.end(), g.breakpoints.begin(), g.breakpoints.end());
    std::sort(pts.begin(), pts.end());
    double acc = 0.0;
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        double len = pts[k + 1] - pts[k];
        if (len <= 0.0) continue;
        double mid = 0.5 * (pts[k] + pts[k + 1]);
        acc += std::fabs(pc_eval(f, mid) - pc_eval(g, mid)) * len;
    }
    return acc;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw ConfigError("exact1d: l1_distance needs equal grids");
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
    return acc / a.size();
}

double godunov_flux(double rho_left, double rho_right, double U) {
    if (U == 0.0) return 0.0;
    auto f = [U](double r) { return r * (1.0 - r) * U; };
    double lo = std::min(rho_left, rho_right);
    double hi = std::max(rho_left, rho_right);
    bool sonic_inside = lo <= 0.5 && 0.5 <= hi;
    if (rho_left <= rho_right) {
        double m = std::min(f(rho_left), f(rho_right));
        // for U < 0 the flux is convex and dips at the sonic point
        if (U < 0.0 && sonic_inside) m = std::min(m, f(0.5));
        return m;
    }
    double m = std::max(f(rho_left), f(rho_right));
    if (U > 0.0 && sonic_inside) m = std::max(m, f(0.5));
    return m;
}

std::vector<double> exact_entropy_solution(const PiecewiseConstant1D& rho0,
                                           double U, double t, int n_eval,
                                           int refine, double cfl) {
    validate(rho0);
    if (n_eval < 1 || refine < 1) throw ConfigError("exact1d: bad grid sizes");
    if (!(cfl > 0.0 && cfl <= 0.5)) throw ConfigError("exact1d: cfl must lie in (0, 0.5]");
    if (t < 0.0) throw ConfigError("exact1d: negative time");
    for (double v : rho0.values)
        if (v < 0.0 || v > 1.0) throw ConfigError("exact1d: density outside [0,1]");

    const int n = n_eval * refine;
    const double h = 1.0 / n;
    std::vector<double> rho = cell_averages(rho0, n);
    std::vector<double> flux(n + 1, 0.0);

    double speed = std::fabs(U);
    double time = 0.0;
    while (speed > 0.0 && time < t) {
        double dt = std::min(cfl * h / speed, t - time);
        flux[0] = godunov_flux(rho[0], rho[0], U);  // free left boundary
        for (int i = 1; i < n; ++i) flux[i] = godunov_flux(rho[i - 1], rho[i], U);
        flux[n] = 0.0;  // wall
        for (int i = 0; i < n; ++i) rho[i] -= dt / h * (flux[i + 1] - flux[i]);
        time += dt;
    }

    std::vector<double> out(n_eval, 0.0);
    for (int i = 0; i < n_eval; ++i) {
        double acc = 0.0;
        for (int k = 0; k < refine; ++k) acc += rho[i * refine + k];
        out[i] = acc / refine;
    }
    return out;
}

PiecewiseConstant1D steady_state_1d(const PiecewiseConstant1D& rho0) {
    validate(rho0);
    double m = pc_mass(rho0);
    if (m < 0.0 || m > 1.0 + 1e-12)
        throw ConfigError("exact1d: mass must lie in [0,1]");
    PiecewiseConstant1D out;
    if (m <= 0.0) {
        out.breakpoints = {0.0, 1.0};
        out.values = {0.0};
    } else if (m >= 1.0) {
        out.breakpoints = {0.0, 1.0};
        out.values = {1.0};
    } else {
        out.breakpoints = {0.0, 1.0 - m, 1.0};
        out.values = {0.0, 1.0};
    }
    return out;
}

}  // namespace satmix
