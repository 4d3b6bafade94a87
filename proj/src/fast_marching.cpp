#include <cmath>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "satmix/velocity.hpp"

namespace satmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest D with ((D-a)+/dx)^2 + ((D-b)+/dy)^2 = 1 given the accepted axis
// minima a, b (either may be +inf).
double eikonal_update(double a, double dx, double b, double dy) {
    if (a > b) {
        std::swap(a, b);
        std::swap(dx, dy);
    }
    if (!std::isfinite(a)) return kInf;
    if (!std::isfinite(b)) return a + dx;
    double p = 1.0 / (dx * dx), q = 1.0 / (dy * dy);
    double s = p + q;
    double lin = p * a + q * b;
    double disc = lin * lin - s * (p * a * a + q * b * b - 1.0);
    if (disc >= 0.0) {
        double d = (lin + std::sqrt(disc)) / s;
        if (d >= b) return d;
    }
    return a + dx;
}

}  // namespace

ScalarField fast_march_distance(const Grid& g, const std::vector<std::uint8_t>& target) {
    if (static_cast<int>(target.size()) != g.cells())
        throw ConfigError("fast_march: target mask size mismatch");

    ScalarField dist(g, 0.0);
    std::vector<std::uint8_t> accepted(g.cells(), 0);
    for (int c = 0; c < g.cells(); ++c) dist[c] = kInf;

    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;

    int seeds = 0;
    for (int c = 0; c < g.cells(); ++c) {
        if (target[c] && g.is_fluid(c)) {
            dist[c] = 0.0;
            heap.push({0.0, c});
            ++seeds;
        }
    }
    if (seeds == 0) throw ConfigError("fast_march: target marks no fluid cell");

    auto neighbor = [&](int i, int j, int di, int dj) -> int {
        int ni = i + di, nj = j + dj;
        if (ni < 0) {
            if (!g.periodic_x()) return -1;
            ni = g.nx - 1;
        } else if (ni >= g.nx) {
            if (!g.periodic_x()) return -1;
            ni = 0;
        }
        if (nj < 0) {
            if (!g.periodic_y()) return -1;
            nj = g.ny - 1;
        } else if (nj >= g.ny) {
            if (!g.periodic_y()) return -1;
            nj = 0;
        }
        int nc = g.cell(ni, nj);
        return g.is_fluid(nc) ? nc : -1;
    };

    while (!heap.empty()) {
        auto [val, c] = heap.top();
        heap.pop();
        if (accepted[c]) continue;
        if (val != dist[c]) continue;  // stale entry
        accepted[c] = 1;

        int i = c % g.nx, j = c / g.nx;
        const int dij[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        for (auto& d4 : dij) {
            int nc = neighbor(i, j, d4[0], d4[1]);
            if (nc < 0 || accepted[nc]) continue;
            int ni = nc % g.nx, nj = nc / g.nx;
            double ax = kInf, ay = kInf;
            for (int s = -1; s <= 1; s += 2) {
                int xc = neighbor(ni, nj, s, 0);
                if (xc >= 0 && accepted[xc]) ax = std::min(ax, dist[xc]);
                int yc = neighbor(ni, nj, 0, s);
                if (yc >= 0 && accepted[yc]) ay = std::min(ay, dist[yc]);
            }
            double cand = eikonal_update(ax, g.dx, ay, g.dy);
            if (cand < dist[nc]) {
                dist[nc] = cand;
                heap.push({cand, nc});
            }
        }
    }

    for (int c = 0; c < g.cells(); ++c)
        if (!g.is_fluid(c)) dist[c] = kInf;
    return dist;
}

int count_unreachable(const ScalarField& dist, const Grid& g) {
    int n = 0;
    for (int c = 0; c < g.cells(); ++c)
        if (g.is_fluid(c) && !std::isfinite(dist[c])) ++n;
    return n;
}

}  // namespace satmix
