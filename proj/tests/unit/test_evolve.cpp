#include <cmath>
#include <numbers>

#include <doctest.h>

#include "pks/evolve.hpp"
#include "pks/initial_data.hpp"
#include "pks/stationary.hpp"

using namespace pks;

namespace {

double l1_distance(const DensityField& a, const DensityField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.grid.cells(); ++i) s += std::abs(a.values[i] - b.values[i]) * a.grid.volume(i);
    return s;
}

double barenblatt_l1_error(std::size_t cells) {
    const double m = 2.0, c = 0.1, t0 = 0.05, t1 = 0.1;
    const RadialGrid g(3, 2.0, cells);
    EvolveOptions opts;
    opts.t_end = t1;
    opts.attraction = false;
    const auto res = evolve(make_state(barenblatt_density(g, t0, m, c), m, t0), opts);
    return l1_distance(res.state.rho, barenblatt_density(g, t1, m, c));
}

}  // namespace

TEST_CASE("stable dt examples") {
    EvolveOptions opts;
    opts.t_end = 1.0;
    const RadialGrid g(3, 0.1, 10);  // dr = 0.01, drift at most r_max/3
    const auto s = make_state(DensityField(g, std::vector<double>(10, 1.0)), 3.0);
    CHECK(stable_dt(s, opts) == doctest::Approx(0.25 * 1e-4 / 3.0).epsilon(1e-12));

    const auto zero = make_state(DensityField(g), 3.0, 0.25);
    CHECK(stable_dt(zero, opts) == doctest::Approx(0.75));

    opts.t_end = 0.25;
    CHECK(stable_dt(zero, opts) == 0.0);
    CHECK(stable_dt(make_state(DensityField(g, std::vector<double>(10, 1.0)), 3.0, 0.25), opts) == 0.0);
}

TEST_CASE("zero density is a fixed point") {
    const RadialGrid g(3, 2.0, 64);
    EvolveOptions opts;
    opts.t_end = 1.0;
    const auto s = step(make_state(DensityField(g), 4.0), 0.1, opts);
    for (double x : s.rho.values) CHECK(x == 0.0);
    CHECK(s.t == doctest::Approx(0.1));
    const auto res = evolve(make_state(DensityField(g), 4.0), opts);
    CHECK(res.state.t == 1.0);
    CHECK(res.state.step_count == 1);
}

TEST_CASE("t_end equal to the start returns the input") {
    const RadialGrid g(3, 4.0, 128);
    const auto rho = bump_density(g, 0.5, 1.0);
    EvolveOptions opts;
    opts.t_end = 0.0;
    opts.snapshot_times = {0.0};
    const auto res = evolve(make_state(rho, 8.0), opts);
    CHECK(res.state.rho.values == rho.values);
    CHECK(res.state.step_count == 0);
    REQUIRE(res.snapshots.size() == 1);
    CHECK(res.snapshots[0].t == 0.0);
}

TEST_CASE("mass is conserved at every snapshot and snapshot times are exact") {
    const RadialGrid g(3, 4.0, 256);
    const auto rho = bump_density(g, 0.5, 1.0);
    const double mass = rho.total_mass();
    EvolveOptions opts;
    opts.t_end = 0.05;
    opts.snapshot_times = {0.01, 0.02, 0.03, 0.04, 0.05};
    int seen = 0;
    const auto res = evolve(make_state(rho, 8.0), opts, [&](const EvolutionState&) { ++seen; });
    REQUIRE(res.snapshots.size() == 5);
    CHECK(seen == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(res.snapshots[k].t == opts.snapshot_times[k]);
        CHECK(std::abs(res.snapshots[k].rho.total_mass() - mass) <= 1e-13 * mass);
    }
    CHECK(res.state.clip_count == 0);
    CHECK(res.state.clipped_mass == 0.0);
}

TEST_CASE("density stays bounded by the watchdog level") {
    const RadialGrid g(3, 4.0, 256);
    const auto rho = bump_density(g, 0.5, 1.0);
    EvolveOptions opts;
    opts.t_end = 0.2;
    const auto res = evolve(make_state(rho, 8.0), opts);
    const double level = 2.0 * std::max({1.0, rho.max(), alpha_bound(rho.total_mass(), 3).first});
    CHECK(res.state.max_density_seen < level);
    for (double x : res.state.rho.values) CHECK(std::isfinite(x));
}

TEST_CASE("porous medium run converges to Barenblatt") {
    // At least first order; this profile is smooth enough that the observed ratio is near 4.
    const double coarse = barenblatt_l1_error(256);
    const double fine = barenblatt_l1_error(512);
    CHECK(coarse / fine >= 2.0 * 0.7);
    CHECK(fine < 1e-4);
}

TEST_CASE("attraction makes a bump contract relative to pure diffusion") {
    const RadialGrid g(3, 4.0, 256);
    const auto rho = bump_density(g, 0.5, 1.0);
    EvolveOptions opts;
    opts.t_end = 0.1;
    const auto with = evolve(make_state(rho, 3.0), opts);
    opts.attraction = false;
    const auto without = evolve(make_state(rho, 3.0), opts);
    CHECK(with.state.rho.values[0] > without.state.rho.values[0]);
}

TEST_CASE("step errors") {
    const RadialGrid g(3, 2.0, 64);
    EvolveOptions opts;
    opts.t_end = 1.0;
    const auto s = make_state(bump_density(g, 0.5, 1.0), 4.0);
    CHECK_THROWS_AS(step(s, 10.0 * stable_dt(s, opts), opts), StepError);
    CHECK_THROWS_AS(step(s, -1.0, opts), StepError);

    // Support that starts in the outer margin trips the domain guard.
    CHECK_THROWS_AS(step(make_state(patch_density(g, 1.95), 4.0), 1e-8, opts), StepError);

    EvolveOptions bad = opts;
    bad.cfl_diffusion = 0.6;
    CHECK_THROWS_AS(evolve(s, bad), Error);
    CHECK_THROWS_AS(make_state(DensityField(g), 1.0), Error);
}
