#include <cmath>
#include <numbers>

#include <doctest.h>

#include "pks/radial_core.hpp"

using namespace pks;
using std::numbers::pi;

namespace {

DensityField constant(const RadialGrid& g, double c) { return DensityField(g, std::vector<double>(g.cells(), c)); }

}  // namespace

TEST_CASE("unit ball volumes") {
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-15));
    CHECK(unit_ball_volume(4) == doctest::Approx(pi * pi / 2.0).epsilon(1e-15));
    // w_n = 2 pi / n * w_{n-2}
    for (int n = 5; n <= 12; ++n)
        CHECK(unit_ball_volume(n) == doctest::Approx(2.0 * pi / n * unit_ball_volume(n - 2)).epsilon(1e-14));
}

TEST_CASE("grid examples") {
    const auto g1 = make_grid(3, 1.0, 1);
    REQUIRE(g1.cells() == 1);
    CHECK(g1.volume(0) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-15));

    const auto g2 = make_grid(3, 2.0, 2);
    CHECK(g2.volume(0) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-15));
    CHECK(g2.volume(1) == doctest::Approx(28.0 * pi / 3.0).epsilon(1e-15));
    CHECK(g2.center(1) == 1.5);
    CHECK(g2.face(2) == 2.0);
    CHECK(g2.face_area(1) == doctest::Approx(4.0 * pi).epsilon(1e-15));
    CHECK(g2.face_area(0) == 0.0);

    CHECK(make_grid(4, 1.0, 1).volume(0) == doctest::Approx(pi * pi / 2.0).epsilon(1e-15));
}

TEST_CASE("volumes telescope to the ball") {
    for (int n : {3, 4, 7}) {
        const RadialGrid g(n, 3.0, 999);
        double sum = 0.0;
        for (std::size_t i = 0; i < g.cells(); ++i) {
            CHECK(g.volume(i) > 0.0);
            sum += g.volume(i);
        }
        CHECK(sum == doctest::Approx(unit_ball_volume(n) * std::pow(3.0, n)).epsilon(1e-12));
        CHECK(g.total_volume() == doctest::Approx(sum).epsilon(1e-14));
    }
}

TEST_CASE("grid rejects bad arguments") {
    CHECK_THROWS_AS(RadialGrid(2, 1.0, 10), Error);
    CHECK_THROWS_AS(RadialGrid(3, 0.0, 10), Error);
    CHECK_THROWS_AS(RadialGrid(3, INFINITY, 10), Error);
    CHECK_THROWS_AS(RadialGrid(3, 1.0, 0), Error);
}

TEST_CASE("pressure law examples") {
    const auto g = make_grid(3, 3.0, 3);
    const DensityField rho(g, {0.0, 1.0, 2.0});
    const auto p = pressure_from_density(rho, 3.0);
    CHECK(p.values[0] == 0.0);
    CHECK(p.values[1] == doctest::Approx(1.5));
    CHECK(p.values[2] == doctest::Approx(6.0));
    CHECK(p.exponent == 3.0);

    const auto back = density_from_pressure(PressureField(g, {0.0, 1.5, 6.0}, 3.0));
    CHECK(back.values[0] == 0.0);
    CHECK(back.values[1] == doctest::Approx(1.0));
    CHECK(back.values[2] == doctest::Approx(2.0));
}

TEST_CASE("density to pressure round trip") {
    const RadialGrid g(3, 1.0, 1001);
    std::vector<double> v(g.cells());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 10.0 * static_cast<double>(i) / 1000.0;
    const DensityField rho(g, v);
    for (double m : {2.0, 3.0, 8.0, 32.0}) {
        const auto back = density_from_pressure(pressure_from_density(rho, m));
        double worst = 0.0;
        for (std::size_t i = 1; i < v.size(); ++i) worst = std::max(worst, std::abs(back.values[i] - v[i]) / v[i]);
        CHECK(back.values[0] == 0.0);
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("fields reject bad values") {
    const auto g = make_grid(3, 1.0, 2);
    CHECK_THROWS_AS(DensityField(g, {1.0}), Error);
    CHECK_THROWS_AS(DensityField(g, {1.0, -1e-3}), Error);
    CHECK_THROWS_AS(DensityField(g, {1.0, NAN}), Error);
    CHECK_THROWS_AS(pressure_from_density(DensityField(g, {1.0, 1.0}), 1.0), Error);
}

TEST_CASE("lp norm examples") {
    const RadialGrid g(3, 1.0, 64);
    const std::vector<double> one(g.cells(), 1.0), two(g.cells(), 2.0), zero(g.cells(), 0.0);
    CHECK(lp_norm(g, one, 1.0) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-13));
    CHECK(lp_norm(g, two, 2.0) == doctest::Approx(2.0 * std::sqrt(4.0 * pi / 3.0)).epsilon(1e-13));
    for (double p : {1.0, 2.0, 3.5, kInfNorm}) CHECK(lp_norm(g, zero, p) == 0.0);
    CHECK(lp_norm(g, two, kInfNorm) == 2.0);
    CHECK(lp_norm(g, two, INFINITY) == 2.0);
    CHECK_THROWS_AS(lp_norm(g, one, 0.5), Error);
}

TEST_CASE("lp norms of a bounded field approach the max norm") {
    const RadialGrid g(3, 1.0, 200);
    std::vector<double> f(g.cells());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 1.0 - g.center(i) * g.center(i);
    // Normalised by |B_1|^(1/p) the norms increase in p towards sup f.
    double prev = 0.0;
    for (double p : {1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
        const double scaled = lp_norm(g, f, p) / std::pow(g.total_volume(), 1.0 / p);
        CHECK(scaled > prev);
        prev = scaled;
    }
    CHECK(prev < lp_norm(g, f, kInfNorm));
}

TEST_CASE("excess above one") {
    const RadialGrid g(3, 1.0, 50);
    CHECK(excess_above_one(constant(g, 0.5)) == 0.0);
    CHECK(excess_above_one(constant(g, 1.0)) == 0.0);
    CHECK(excess_above_one(constant(g, 2.0)) == doctest::Approx(std::sqrt(4.0 * pi / 3.0)).epsilon(1e-13));
}

TEST_CASE("total mass and max") {
    const RadialGrid g(4, 2.0, 40);
    const auto rho = constant(g, 3.0);
    CHECK(rho.total_mass() == doctest::Approx(3.0 * unit_ball_volume(4) * 16.0).epsilon(1e-13));
    CHECK(rho.max() == 3.0);
    CHECK(DensityField(g).total_mass() == 0.0);
}
