#include <cmath>
#include <numbers>

#include <doctest.h>

#include "pks/evolve.hpp"
#include "pks/initial_data.hpp"
#include "pks/potential.hpp"
#include "pks/stationary.hpp"

using namespace pks;
using std::numbers::pi;

TEST_CASE("shooting starts on the Taylor series") {
    for (int n : {3, 4}) {
        const double alpha = 0.8, m = 8.0, k = (m - 1.0) / m;
        const double a0 = std::pow(alpha, m - 1.0);
        const double quartic = k * std::pow(alpha, 3.0 - m) / (8.0 * n * m * (n + 2.0));
        const auto p = shoot(alpha, m, n, 1e-4);
        CHECK(p.psi[0] == doctest::Approx(a0).epsilon(1e-15));
        CHECK(p.dpsi[0] == 0.0);
        // Two-term remainder is O(r^4) with the series coefficient.
        for (std::size_t idx : {200u, 500u, 1000u}) {
            const double r = p.r[idx];
            const double rem = (p.psi[idx] - (a0 - k * alpha * r * r / (2.0 * n))) / std::pow(r, 4);
            CHECK(rem == doctest::Approx(quartic).epsilon(2e-2));
        }
    }
}

TEST_CASE("profile shape") {
    const auto p = shoot(1.0, 3.0, 3, 1e-3);
    CHECK(p.support_radius > 0.0);
    CHECK(p.psi.back() <= 0.0);
    CHECK(p.r[p.r.size() - 2] < p.support_radius);
    CHECK(p.r.back() >= p.support_radius);
    for (std::size_t i = 1; i + 1 < p.psi.size(); ++i) CHECK(p.dpsi[i] < 0.0);
    CHECK(p.psi_at(0.0) == doctest::Approx(1.0));
    CHECK(p.density_at(p.support_radius) == 0.0);
    CHECK(p.density_at(p.support_radius + 1.0) == 0.0);
    CHECK(p.pressure_at(0.0) == doctest::Approx(1.5));
}

TEST_CASE("uv invariants near the origin and along the profile") {
    for (int n : {3, 4})
        for (double m : {3.0, 8.0, 32.0}) {
            CAPTURE(n);
            CAPTURE(m);
            const double alpha = 0.9;
            const auto p = shoot(alpha, m, n, 1e-4);
            const auto uv = uv_trajectory(p);
            CHECK(uv.u_in_range);
            CHECK(uv.v_positive);
            CHECK(uv.u_plus_v_exceeds_n);
            CHECK(uv.v_above_subsolution);
            CHECK(uv.all());
            REQUIRE(uv.samples.size() > 10);
            const auto& s = uv.samples.front();
            CHECK(s.u == doctest::Approx(n).epsilon(1e-5));
            CHECK(s.v / (s.r * s.r) == doctest::Approx((m - 1.0) / (m * n) * std::pow(alpha, 2.0 - m)).epsilon(1e-5));
        }
}

TEST_CASE("mass grows with alpha and vanishes as alpha -> 0") {
    double prev = 0.0;
    for (double alpha : {0.01, 0.1, 0.3, 0.6, 0.9, 1.2}) {
        const double mass = mass_of_profile(shoot(alpha, 4.0, 3, 1e-3));
        CHECK(mass > prev);
        prev = mass;
    }
    CHECK(mass_of_profile(shoot(1e-3, 4.0, 3, 1e-3)) < 1e-2 * mass_of_profile(shoot(0.3, 4.0, 3, 1e-3)));
}

TEST_CASE("mass routes agree and refine at fourth order") {
    const auto a = shoot(0.7, 6.0, 3, 1.6e-3);
    const auto b = shoot(0.7, 6.0, 3, 8e-4);
    const auto c = shoot(0.7, 6.0, 3, 4e-4);
    CHECK(mass_of_profile(c) == doctest::Approx(mass_from_flux(c)).epsilon(1e-12));
    CHECK(c.mass == mass_of_profile(c));
    const double d1 = std::abs(a.mass - b.mass), d2 = std::abs(b.mass - c.mass);
    CHECK(d2 < 1e-10 * c.mass);
    CHECK(d1 / d2 > 10.0);
    CHECK(b.support_radius == doctest::Approx(c.support_radius).epsilon(1e-10));
}

TEST_CASE("solve for mass") {
    const double mass = 4.0 * pi;
    for (double m : {4.0, 16.0}) {
        const auto p = solve_for_mass(mass, m, 3);
        const auto ab = alpha_bound(mass, 3);
        CHECK(std::abs(p.mass - mass) <= 1e-8 * mass);
        CHECK(p.alpha <= ab.first);
        CHECK(std::pow(p.alpha, m - 1.0) <= ab.second);
        CHECK(p.support_radius <= rstar_bound(mass, 3));
    }
    CHECK_THROWS_AS(solve_for_mass(1.0, 2.5, 3), Error);
    CHECK_THROWS_AS(solve_for_mass(-1.0, 4.0, 3), Error);
}

TEST_CASE("closed-form bounds") {
    const auto ab = alpha_bound(4.0 * pi, 3);
    CHECK(ab.first == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(ab.second == doctest::Approx(4.0).epsilon(1e-15));
    const auto tiny = alpha_bound(1e-12, 3);
    CHECK(tiny.first == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(tiny.second == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rstar_bound(4.0 * pi, 3) == doctest::Approx(6.929182510314625).epsilon(1e-14));
    CHECK(rstar_bound(4.0 * pi, 3) == doctest::Approx(std::log1p(std::exp(std::sqrt(48.0)))).epsilon(1e-15));
    CHECK(limit_radius(4.0 * pi / 3.0, 3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(limit_radius(pi * pi / 2.0, 4) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(limit_radius(32.0 * pi / 3.0, 3) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("stationary residual") {
    // Pressure built by integrating -u inward from zero at the support edge.
    const RadialGrid g(3, 4.0, 400);
    const auto rho = bump_density(g, 0.6, 1.5);
    const auto u = potential_gradient(rho);
    const std::size_t edge = 300;
    std::vector<double> pv(g.cells(), 0.0);
    for (std::size_t j = edge; j-- > 1;) pv[j - 1] = pv[j] + g.dr() * u[j];
    const PressureField p(g, pv, 4.0);
    CHECK(stationary_residual(rho, p, g.face(edge)) <= 1e-12);

    const auto prof = shoot(1.0, 3.0, 3, 1e-4);
    const RadialGrid common(3, 1.25 * prof.support_radius, 2000);
    const double base = stationary_residual(prof, common);
    CHECK(base < 1e-2);
    CHECK(stationary_residual(prof, RadialGrid(3, 1.25 * prof.support_radius, 4000)) < base);

    auto bumped = resample_pressure(prof, common);
    bumped.values[1000] *= 1.01;
    CHECK(stationary_residual(resample_density(prof, common), bumped, prof.support_radius) > 10.0 * base);
}

TEST_CASE("resampling") {
    const auto p = shoot(0.9, 8.0, 3, 1e-4);
    const RadialGrid g(3, 2.0 * p.support_radius, 256);
    const auto rho = resample_density(p, g);
    const auto pr = resample_pressure(p, g);
    CHECK(rho.values[0] == doctest::Approx(0.9).epsilon(1e-4));
    CHECK(rho.values.back() == 0.0);
    CHECK(pr.exponent == 8.0);
    CHECK(rho.total_mass() == doctest::Approx(p.mass).epsilon(5e-2));
    CHECK_THROWS_AS(resample_density(p, RadialGrid(4, 2.0, 10)), Error);
}

TEST_CASE("shooting argument checks") {
    CHECK_THROWS_AS(shoot(0.0, 4.0, 3, 1e-3), Error);
    CHECK_THROWS_AS(shoot(1.0, 2.0, 3, 1e-3), Error);
    CHECK_THROWS_AS(shoot(1.0, 4.0, 2, 1e-3), Error);
    CHECK_THROWS_AS(shoot(1.0, 4.0, 3, 0.0), Error);
}

TEST_CASE("resampled profile is numerically steady under evolution") {
    const double mass = 4.0 * pi / 3.0, m = 8.0;
    const auto p = solve_for_mass(mass, m, 3);
    const RadialGrid g(3, 4.0, 2048);
    const auto rho = resample_density(p, g);
    EvolveOptions opts;
    opts.t_end = 1.0;
    const auto res = evolve(make_state(rho, m), opts);
    double change = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) change += std::abs(res.state.rho.values[i] - rho.values[i]) * g.volume(i);
    CHECK(change <= 5e-3 * mass);
    CHECK(res.state.clip_count == 0);
}
