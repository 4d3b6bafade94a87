#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "satmix/ot1d.hpp"
#include "support/oracles.hpp"

using namespace satmix;

namespace {

Density1D random_density(int n, unsigned seed, double floor = 0.0) {
    return Density1D(n, oracle::random_density(n, seed, floor));
}

Density1D rescale_to_mass(Density1D d, double mass) {
    double f = mass / d.mass();
    for (double& x : d.v) x *= f;
    return d;
}

}  // namespace

TEST_CASE("quantile walks the cumulative mass") {
    Density1D d(4, {1.0, 0.0, 0.0, 1.0});
    CHECK(d.mass() == doctest::Approx(0.5));
    CHECK(quantile(d, 0.0) == doctest::Approx(0.0));
    CHECK(quantile(d, 0.125) == doctest::Approx(0.125));
    CHECK(quantile(d, 0.25) == doctest::Approx(0.25));
    // the empty middle is jumped over
    CHECK(quantile(d, 0.3) == doctest::Approx(0.8));
    CHECK(quantile(d, 0.5) == doctest::Approx(1.0));

    CHECK_THROWS_AS(quantile(d, 0.6), ConfigError);
    CHECK_THROWS_AS(quantile(d, -0.1), ConfigError);
    Density1D z(3, {0.0, 0.0, 0.0});
    CHECK_THROWS_AS(quantile(z, 0.0), ZeroMass);
    CHECK_THROWS_AS(Density1D(2, {0.5, -0.1}), ConfigError);
}

TEST_CASE("half-domain swap costs an eighth") {
    Density1D a(2, {1.0, 0.0});
    Density1D b(2, {0.0, 1.0});
    CHECK(w2_squared(a, b) == doctest::Approx(0.125).epsilon(1e-13));
    CHECK(w2(a, b) == doctest::Approx(std::sqrt(0.125)).epsilon(1e-13));
    CHECK(w2_squared(a, a) == doctest::Approx(0.0));
}

TEST_CASE("translation cost is mass times squared shift") {
    const int n = 64, pad = 8, k = 5;
    std::vector<double> base = oracle::random_density(n, 17, 0.2);
    for (int i = 0; i < pad; ++i) base[i] = 0.0;
    for (int i = n - pad; i < n; ++i) base[i] = 0.0;
    std::vector<double> shifted(n, 0.0);
    for (int i = 0; i + k < n; ++i) shifted[i + k] = base[i];
    Density1D a(n, base), b(n, shifted);
    double expect = a.mass() * std::pow(k / double(n), 2);
    CHECK(w2_squared(a, b) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("segment integral agrees with an atomized transport plan") {
    for (unsigned seed : {1u, 2u, 3u, 4u}) {
        Density1D a = random_density(48, seed);
        Density1D b = rescale_to_mass(random_density(48, seed + 100), a.mass());
        double exact = w2_squared(a, b);
        double atoms = oracle::atom_w2_squared(a.v, b.v, 200000);
        CHECK(std::abs(exact - atoms) <= 1e-4 * (1.0 + exact));
    }
}

TEST_CASE("mass mismatch is rejected") {
    Density1D a(4, {1.0, 1.0, 0.0, 0.0});
    Density1D b(4, {1.0, 1.0, 1.0, 0.0});
    CHECK_THROWS_AS(w2_squared(a, b), MassMismatch);
}

TEST_CASE("product measures split the cost by marginal mass") {
    for (unsigned seed : {5u, 6u, 7u, 8u, 9u}) {
        Density1D mu1 = random_density(32, seed);
        Density1D nu1 = rescale_to_mass(random_density(32, seed + 50), mu1.mass());
        Density1D mu2 = random_density(24, seed + 200, 0.1);
        Density1D nu2 = rescale_to_mass(random_density(24, seed + 250, 0.1), mu2.mass());
        auto [lhs, rhs] = product_w2_check(mu1, nu1, mu2, nu2);
        CHECK(std::abs(lhs - rhs) <= 1e-8 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("gradient matches central differences along mass-neutral directions") {
    const int n = 24;
    Density1D a = random_density(n, 31, 0.2);
    Density1D b = rescale_to_mass(random_density(n, 77, 0.2), a.mass());
    std::vector<double> grad = w2_squared_gradient(a, b);
    REQUIRE(static_cast<int>(grad.size()) == n);

    const double h = 1e-6;
    for (auto [j, k] : std::vector<std::pair<int, int>>{{0, 12}, {3, 20}, {7, 8}, {15, 23}}) {
        Density1D ap = a, am = a;
        ap.v[j] += h;
        ap.v[k] -= h;
        am.v[j] -= h;
        am.v[k] += h;
        double fd = (w2_squared(ap, b) - w2_squared(am, b)) / (2.0 * h);
        double an = grad[j] - grad[k];
        CHECK(std::abs(fd - an) <= 1e-4 * (1.0 + std::abs(an)));
    }
}

TEST_CASE("one minimizing-movement step descends and conserves mass") {
    const int n = 32;
    std::vector<double> vals(n, 0.0);
    for (int i = 8; i < 16; ++i) vals[i] = 1.0;
    Density1D prev(n, vals);
    std::vector<double> D1(n), D2(n, 0.0);
    for (int i = 0; i < n; ++i) D1[i] = -(i + 0.5) / n;  // pull right

    JkoParams params;
    params.tau = 0.05;
    JkoResult res = jko_step(prev, D1, D2, params);

    CHECK(res.rho1.mass() == doctest::Approx(prev.mass()).epsilon(1e-12));
    for (double v : res.rho1.v) {
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-12);
    }
    CHECK(res.pg_norm <= params.pg_tol);

    auto objective = [&](const Density1D& r) {
        double lin = 0.0;
        for (int i = 0; i < n; ++i)
            lin += (D1[i] * r.v[i] + D2[i] * (1.0 - r.v[i])) / n;
        Density1D c1(n, std::vector<double>(n)), c0(n, std::vector<double>(n));
        for (int i = 0; i < n; ++i) {
            c1.v[i] = 1.0 - r.v[i];
            c0.v[i] = 1.0 - prev.v[i];
        }
        return lin + (w2_squared(r, prev) + w2_squared(c1, c0)) / (2.0 * params.tau);
    };
    CHECK(res.objective <= objective(prev) + 1e-12);
    CHECK(res.objective == doctest::Approx(objective(res.rho1)).epsilon(1e-9));

    // the step actually moved mass toward lower potential
    double com_prev = 0.0, com_next = 0.0;
    for (int i = 0; i < n; ++i) {
        com_prev += (i + 0.5) / n * prev.v[i] / n;
        com_next += (i + 0.5) / n * res.rho1.v[i] / n;
    }
    CHECK(com_next > com_prev);
}

TEST_CASE("zero potentials leave the density in place") {
    const int n = 16;
    std::vector<double> vals(n, 0.0);
    for (int i = 4; i < 10; ++i) vals[i] = 0.8;
    Density1D prev(n, vals);
    std::vector<double> zero(n, 0.0);
    JkoParams params;
    params.tau = 0.1;
    JkoResult res = jko_step(prev, zero, zero, params);
    for (int i = 0; i < n; ++i)
        CHECK(res.rho1.v[i] == doctest::Approx(prev.v[i]).epsilon(1e-5));
    CHECK(res.objective <= 1e-8);
}

TEST_CASE("capped simplex projection") {
    // projecting a point already inside returns it unchanged
    std::vector<double> inside{0.2, 0.8, 0.5, 0.0};
    std::vector<double> p = project_capped_simplex(inside, 0.25, 0.375);
    for (int i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(inside[i]).epsilon(1e-12));

    // out-of-range coordinates clip while the mass is held
    std::vector<double> outside{1.4, -0.3, 0.5, 0.1};
    std::vector<double> q = project_capped_simplex(outside, 0.25, 0.375);
    double mass = 0.0;
    for (double v : q) {
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-12);
        mass += v * 0.25;
    }
    CHECK(mass == doctest::Approx(0.375).epsilon(1e-12));

    CHECK_THROWS_AS(project_capped_simplex(outside, 0.25, 2.0), ConfigError);
}

TEST_CASE("jko validates its inputs") {
    Density1D prev(4, {0.5, 0.5, 0.0, 0.0});
    std::vector<double> D(4, 0.0);
    JkoParams params;
    params.tau = -1.0;
    CHECK_THROWS_AS(jko_step(prev, D, D, params), ConfigError);
    params.tau = 0.1;
    CHECK_THROWS_AS(jko_step(prev, std::vector<double>(3, 0.0), D, params), ConfigError);
    Density1D zero(4, {0.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(jko_step(zero, D, D, params), ZeroMass);
    Density1D over(4, {1.5, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(jko_step(over, D, D, params), ConfigError);
}
