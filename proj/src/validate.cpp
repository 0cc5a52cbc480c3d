#include <cmath>
#include <numbers>
#include <sstream>

#include "pks/cli_io.hpp"
#include "pks/initial_data.hpp"
#include "pks/potential.hpp"

namespace pks::io {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

OracleCheck check(std::string name, double value, double tol) {
    return {std::move(name), value <= tol, "value " + fmt(value) + " tol " + fmt(tol)};
}

// Flux form of the discrete Poisson identity: a_{i+1} u_{i+1} - a_i u_i = rho_i v_i.
double divergence_identity_error(int n) {
    const RadialGrid g(n, 4.0, 1024);
    const auto rho = bump_density(g, 0.7, 1.5);
    const auto u = potential_gradient(rho);
    double err = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double lhs = g.face_area(i + 1) * u[i + 1] - g.face_area(i) * u[i];
        err = std::max(err, std::abs(lhs - rho.values[i] * g.volume(i)));
    }
    return err / rho.total_mass();
}

// Laplacian of the potential reproduces rho on all cells but the outermost.
double potential_laplacian_error(int n) {
    const RadialGrid g(n, 4.0, 512);
    const auto rho = bump_density(g, 0.7, 1.5);
    const auto phi = potential_value(rho);
    const auto lap = radial_laplacian(g, phi);
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < g.cells(); ++i) err = std::max(err, std::abs(lap[i] - rho.values[i]));
    return err / rho.max();
}

// Outside a ball the field is M / |dB_r|.
double exterior_field_error(int n) {
    const RadialGrid g(n, 4.0, 1024);
    const auto rho = patch_density(g, 1.0);
    const double mass = rho.total_mass();
    const auto u = potential_gradient(rho);
    double err = 0.0;
    for (std::size_t j = 1; j <= g.cells(); ++j) {
        const double r = g.face(j);
        if (r <= 1.0) continue;
        err = std::max(err, std::abs(u[j] - mass / (n * unit_ball_volume(n) * std::pow(r, n - 1))) / u[j]);
    }
    return err;
}

// ... and the potential is -M / (n(n-2) w_n r^(n-2)).
double exterior_potential_error(int n) {
    const RadialGrid g(n, 4.0, 1024);
    const auto rho = patch_density(g, 1.0);
    const double mass = rho.total_mass();
    const auto phi = potential_value(rho);
    double err = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double r = g.center(i);
        if (r <= 1.0) continue;
        const double exact = -mass / (n * (n - 2) * unit_ball_volume(n) * std::pow(r, n - 2));
        err = std::max(err, std::abs(phi[i] - exact) / std::abs(exact));
    }
    return err;
}

// Porous medium run without attraction against the Barenblatt profile.
double barenblatt_error(int n) {
    const double m = 2.0;
    const double c = 0.1;
    const double t0 = 0.05;
    const double t1 = 0.1;
    const RadialGrid g(n, 2.0, 256);
    EvolveOptions opts;
    opts.t_end = t1;
    opts.attraction = false;
    const auto res = evolve(make_state(barenblatt_density(g, t0, m, c), m, t0), opts);
    const auto exact = barenblatt_density(g, t1, m, c);
    double err = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i)
        err += std::abs(res.state.rho.values[i] - exact.values[i]) * g.volume(i);
    return err / exact.total_mass();
}


double patch_velocity_error(int n) {
    const RadialGrid g(n, 4.0, 1024);
    return stationary_residual(patch_density(g, 1.0), patch_pressure(1.0, n, g), 1.0);
}

double patch_dissipation(int n) {
    const RadialGrid g(n, 4.0, 2048);
    return dissipation(patch_density(g, 1.0), patch_pressure(1.0, n, g));
}

// (Psi(r) - alpha^(m-1) + k alpha r^2 / (2n)) / r^4 against the quartic coefficient.
double taylor_error(int n) {
    const double alpha = 0.8;
    const double m = 8.0;
    const double k = (m - 1.0) / m;
    const auto p = shoot(alpha, m, n, 1e-4);
    const std::size_t idx = 500;
    const double r = p.r[idx];
    const double two_term = std::pow(alpha, m - 1.0) - k * alpha * r * r / (2.0 * n);
    const double quartic = k * std::pow(alpha, 3.0 - m) / (8.0 * n * m * (n + 2.0));
    return std::abs((p.psi[idx] - two_term) / std::pow(r, 4) - quartic) / quartic;
}

double mass_route_error(int n) {
    const auto p = shoot(0.7, 6.0, n, 2e-4);
    return std::abs(mass_of_profile(p) - mass_from_flux(p)) / mass_of_profile(p);
}

OracleCheck stationary_bounds(int n, double mass, double m) {
    std::ostringstream name;
    name << "stationary bounds n=" << n << " m=" << m;
    try {
        const auto p = solve_for_mass(mass, m, n);
        const auto ab = alpha_bound(mass, n);
        const bool ok = std::abs(p.mass - mass) <= 1e-8 * mass && p.alpha <= ab.first &&
                        std::pow(p.alpha, m - 1.0) <= ab.second && uv_trajectory(p).all() &&
                        p.support_radius <= rstar_bound(mass, n);
        return {name.str(), ok, "alpha " + fmt(p.alpha) + " R " + fmt(p.support_radius)};
    } catch (const std::exception& e) {
        return {name.str(), false, e.what()};
    }
}

}  // namespace

double patch_omega_defect(int n, const Laplacian& laplacian) {
    const RadialGrid g(n, 4.0, 1024);
    const auto rho = patch_density(g, 1.0);
    const auto p = patch_pressure(1.0, n, g);
    const auto lap = laplacian(g, p.values);
    double err = 0.0;
    for (std::size_t i = 0; g.face(i + 1) < 1.0 - 1e-12; ++i) err = std::max(err, std::abs(lap[i] + rho.values[i]));
    return err;
}

std::vector<OracleCheck> run_validation() {
    using std::numbers::pi;
    std::vector<OracleCheck> out;
    auto guarded = [&](const std::string& name, auto&& value, double tol) {
        try {
            out.push_back(check(name, value(), tol));
        } catch (const std::exception& e) {
            out.push_back({name, false, e.what()});
        }
    };
    for (int n : {3, 4}) {
        const std::string d = " n=" + std::to_string(n);
        guarded("grid volumes" + d, [&] {
            const RadialGrid g(n, 2.0, 2);
            const double w = unit_ball_volume(n);
            return std::abs(g.volume(1) - w * (std::pow(2.0, n) - 1.0)) / g.volume(1);
        }, 1e-14);
        guarded("potential divergence identity" + d, [&] { return divergence_identity_error(n); }, 1e-12);
        guarded("potential laplacian" + d, [&] { return potential_laplacian_error(n); }, 1e-6);
        guarded("potential exterior field" + d, [&] { return exterior_field_error(n); }, 1e-12);
        guarded("potential exterior value" + d, [&] { return exterior_potential_error(n); }, 1e-5);
        guarded("barenblatt short run" + d, [&] { return barenblatt_error(n); }, 1e-3);
        guarded("patch complementarity" + d, [&] { return patch_omega_defect(n, radial_laplacian); }, 1e-9);
        guarded("patch boundary velocity" + d, [&] { return patch_velocity_error(n); }, 1e-9);
        guarded("patch dissipation" + d, [&] { return patch_dissipation(n); }, 1e-6);
        guarded("taylor start" + d, [&] { return taylor_error(n); }, 2e-2);
        guarded("shooting mass routes" + d, [&] { return mass_route_error(n); }, 1e-4);
    }
    guarded("alpha bound n=3 M=4pi", [&] {
        const auto ab = alpha_bound(4.0 * pi, 3);
        return std::max(std::abs(ab.first - 2.0), std::abs(ab.second - 4.0));
    }, 1e-12);
    guarded("support bound n=3 M=4pi", [&] { return std::abs(rstar_bound(4.0 * pi, 3) - 6.929182510314625); }, 1e-12);
    guarded("limit radius", [&] {
        return std::max(std::abs(limit_radius(4.0 * pi / 3.0, 3) - 1.0), std::abs(limit_radius(pi * pi / 2.0, 4) - 1.0));
    }, 1e-12);
    out.push_back(stationary_bounds(3, 4.0 * pi / 3.0, 8.0));
    out.push_back(stationary_bounds(4, 1.0, 16.0));
    return out;
}

}  // namespace pks::io
