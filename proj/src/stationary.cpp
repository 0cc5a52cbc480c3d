#include "pks/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pks/potential.hpp"

namespace pks {

namespace {

struct OdeState {
    double psi;
    double flux;  // r^(n-1) Psi'
};

struct ShootingRhs {
    int n;
    double k;    // (m-1)/m
    double ex;   // 1/(m-1)

    OdeState operator()(double r, const OdeState& y) const {
        const double w = std::pow(r, n - 1);
        const double src = y.psi > 0.0 ? std::pow(y.psi, ex) : 0.0;
        return {y.flux / w, -k * w * src};
    }
};

OdeState rk4(const ShootingRhs& f, double r, const OdeState& y, double h) {
    const auto k1 = f(r, y);
    const auto k2 = f(r + 0.5 * h, {y.psi + 0.5 * h * k1.psi, y.flux + 0.5 * h * k1.flux});
    const auto k3 = f(r + 0.5 * h, {y.psi + 0.5 * h * k2.psi, y.flux + 0.5 * h * k2.flux});
    const auto k4 = f(r + h, {y.psi + h * k3.psi, y.flux + h * k3.flux});
    return {y.psi + h / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi),
            y.flux + h / 6.0 * (k1.flux + 2.0 * k2.flux + 2.0 * k3.flux + k4.flux)};
}

double hermite(double t, double h, double y0, double d0, double y1, double d1) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * d1;
}

double softplus(double x) { return x > 30.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double StationaryProfile::psi_at(double radius) const {
    if (radius < 0.0) radius = -radius;
    if (radius >= support_radius || r.size() < 2) return 0.0;
    std::size_t k = static_cast<std::size_t>(radius / dr_ode);
    k = std::min(k, r.size() - 2);
    const double h = r[k + 1] - r[k];
    const double t = (radius - r[k]) / h;
    return std::max(0.0, hermite(t, h, psi[k], dpsi[k], psi[k + 1], dpsi[k + 1]));
}

double StationaryProfile::density_at(double radius) const {
    const double x = psi_at(radius);
    return x > 0.0 ? std::pow(x, 1.0 / (m - 1.0)) : 0.0;
}

namespace {

constexpr std::size_t kMaxShootingSteps = 50'000'000;

// Switch to the edge variable once Psi drops below this fraction of Psi(0).
constexpr double kEdgeFraction = 0.25;
constexpr double kInnerLength = 0.05;

struct EdgeState {
    double r;
    double flux;
    double mass;  // int r^(n-1) rho dr from the switch point
};

// With rho = rho_j z, z running from 1 down to 0:
//   dr/dz    = (m-1) rho_j^(m-1) z^(m-2) r^(n-1) / flux
//   dflux/dz = -k r^(n-1) rho dr/dz,   dmass/dz = r^(n-1) rho dr/dz
// which is polynomial in z for integer m.
struct EdgeRhs {
    int n;
    double m;
    double k;
    double rho_j;

    EdgeState operator()(double z, const EdgeState& y) const {
        const double w = std::pow(y.r, n - 1);
        const double drdz = (m - 1.0) * std::pow(rho_j, m - 1.0) * std::pow(z, m - 2.0) * w / y.flux;
        const double src = w * rho_j * z * drdz;
        return {drdz, -k * src, src};
    }
};

EdgeState rk4(const EdgeRhs& f, double z, const EdgeState& y, double h) {
    auto at = [&](const EdgeState& d, double s) { return EdgeState{y.r + s * d.r, y.flux + s * d.flux, y.mass + s * d.mass}; };
    const auto k1 = f(z, y);
    const auto k2 = f(z + 0.5 * h, at(k1, 0.5 * h));
    const auto k3 = f(z + 0.5 * h, at(k2, 0.5 * h));
    const auto k4 = f(z + h, at(k3, h));
    return {y.r + h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r),
            y.flux + h / 6.0 * (k1.flux + 2.0 * k2.flux + 2.0 * k3.flux + k4.flux),
            y.mass + h / 6.0 * (k1.mass + 2.0 * k2.mass + 2.0 * k3.mass + k4.mass)};
}

// Support radius, edge flux and tail mass from the last node with
// Psi >= kEdgeFraction Psi(0). The z step keeps the r increments near dr_ode.
void integrate_edge(StationaryProfile& p, const ShootingRhs& f) {
    const double cut = kEdgeFraction * p.psi.front();
    std::size_t j = p.psi.size() - 2;
    while (j > 1 && p.psi[j] < cut) --j;
    const double rho_j = std::pow(p.psi[j], f.ex);
    const double flux_j = std::pow(p.r[j], p.n - 1) * p.dpsi[j];
    const EdgeRhs g{p.n, p.m, f.k, rho_j};

    const double span = p.r.back() - p.r[j];
    const auto steps = static_cast<std::size_t>(std::ceil(2.0 * (p.m - 1.0) * span / p.dr_ode)) + 64;
    const double dz = -1.0 / static_cast<double>(steps);
    EdgeState y{p.r[j], flux_j, 0.0};
    for (std::size_t s = 0; s < steps; ++s) y = rk4(g, 1.0 + static_cast<double>(s) * dz, y, dz);

    p.edge_node = j;
    p.support_radius = y.r;
    p.edge_flux = y.flux;
    p.tail_mass = y.mass;
}

// Integrates outward; when the enclosed mass exceeds mass_cap the shot is
// abandoned and returned with mass = +inf (the final mass can only be larger).
StationaryProfile shoot_capped(double alpha, double m, int n, double dr_ode, double mass_cap) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error("shoot: alpha must be positive");
    if (!(m > 2.0)) throw Error("shoot: m must exceed 2");
    if (n < 3) throw Error("shoot: n must be >= 3");
    if (!(dr_ode > 0.0)) throw Error("shoot: dr_ode must be positive");

    const double k = (m - 1.0) / m;
    const ShootingRhs f{n, k, 1.0 / (m - 1.0)};
    const double omega = unit_ball_volume(n);

    StationaryProfile p;
    p.m = m;
    p.n = n;
    p.alpha = alpha;
    p.dr_ode = dr_ode;

    const double a0 = std::pow(alpha, m - 1.0);
    p.r.push_back(0.0);
    p.psi.push_back(a0);
    p.dpsi.push_back(0.0);

    // Series start: Psi = a0 - B r^2 + C r^4.
    const double h = dr_ode;
    const double b = k * alpha / (2.0 * n);
    const double c = k * std::pow(alpha, 3.0 - m) / (8.0 * n * m * (n + 2.0));
    OdeState y{a0 - b * h * h + c * h * h * h * h, 0.0};
    double dpsi = -2.0 * b * h + 4.0 * c * h * h * h;
    y.flux = std::pow(h, n - 1) * dpsi;
    double r = h;
    p.r.push_back(r);
    p.psi.push_back(y.psi);
    p.dpsi.push_back(dpsi);

    std::size_t step = 1;
    while (y.psi > 0.0) {
        // Near the origin the flux form carries 1/r^(n-1); sub-step the first intervals.
        const auto sub = static_cast<std::size_t>(std::ceil(kInnerLength / r));
        for (std::size_t q = 0; q < sub; ++q) y = rk4(f, r + static_cast<double>(q) * h / sub, y, h / sub);
        ++step;
        r = static_cast<double>(step) * h;
        p.r.push_back(r);
        p.psi.push_back(y.psi);
        p.dpsi.push_back(y.flux / std::pow(r, n - 1));
        if (!std::isfinite(y.psi)) throw Error("shoot: non-finite state");
        const double mass_so_far = -n * omega * y.flux / k;
        if (mass_so_far > mass_cap) {
            p.mass = std::numeric_limits<double>::infinity();
            return p;
        }
        if (y.psi > 0.0 && (step > kMaxShootingSteps ||
                            r > 2.0 * rstar_bound(std::max(mass_so_far, 1e-300), n))) {
            std::ostringstream os;
            os << "shoot: Psi did not reach zero before r=" << r << " (alpha=" << alpha << ", m=" << m << ")";
            throw Error(os.str());
        }
    }

    integrate_edge(p, f);
    p.mass = mass_of_profile(p);
    return p;
}

}  // namespace

StationaryProfile shoot(double alpha, double m, int n, double dr_ode) {
    return shoot_capped(alpha, m, n, dr_ode, std::numeric_limits<double>::infinity());
}

double mass_of_profile(const StationaryProfile& p) {
    const std::size_t last = p.edge_node;
    if (last < 1) return 0.0;
    const int n = p.n;
    const double ex = 1.0 / (p.m - 1.0);
    const double h = p.dr_ode;
    auto g = [&](std::size_t i) { return std::pow(p.r[i], n - 1) * std::pow(std::max(p.psi[i], 0.0), ex); };

    double s = 0.0;
    std::size_t i = 0;
    if (last % 2 == 1) {
        if (last >= 3) {
            s += 3.0 * h / 8.0 * (g(0) + 3.0 * g(1) + 3.0 * g(2) + g(3));
            i = 3;
        } else {
            s += 0.5 * h * (g(0) + g(1));
            i = 1;
        }
    }
    for (; i + 2 <= last; i += 2) s += h / 3.0 * (g(i) + 4.0 * g(i + 1) + g(i + 2));
    return n * unit_ball_volume(n) * (s + p.tail_mass);
}

double mass_from_flux(const StationaryProfile& p) {
    return -p.n * unit_ball_volume(p.n) * p.m / (p.m - 1.0) * p.edge_flux;
}

double default_dr_ode(double mass, int n) { return rstar_bound(mass, n) / 20000.0; }

StationaryProfile solve_for_mass(double mass, double m, int n, const SolveOptions& opts) {
    if (!(mass > 0.0)) throw Error("solve_for_mass: mass must be positive");
    if (!(m >= 3.0)) throw Error("solve_for_mass: m must be >= 3");
    const double h = opts.dr_ode > 0.0 ? opts.dr_ode : default_dr_ode(mass, n);

    // Shots whose enclosed mass passes the cap come back with infinite mass;
    // they only serve as upper bracket ends.
    const double cap = 2.0 * mass;
    auto close = [&](const StationaryProfile& p) { return std::abs(p.mass - mass) <= opts.rel_tol * mass; };

    double hi = alpha_bound(mass, n).first;
    auto p_hi = shoot_capped(hi, m, n, h, cap);
    if (p_hi.mass < mass) {
        std::ostringstream os;
        os << "solve_for_mass: bracket failure, mass(alpha_bound)=" << p_hi.mass << " < M=" << mass
           << " contradicts the alpha bound";
        throw Error(os.str());
    }
    if (close(p_hi)) return p_hi;

    double lo = hi;
    StationaryProfile p_lo;
    for (;;) {
        lo *= 0.9;
        if (lo < 1e-12) throw Error("solve_for_mass: could not bracket from below");
        p_lo = shoot_capped(lo, m, n, h, cap);
        if (close(p_lo)) return p_lo;
        if (p_lo.mass < mass) break;
        hi = lo;
        p_hi = std::move(p_lo);
    }

    // Bisection to a coarse tolerance, then secant steps kept inside the bracket.
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        auto pm = shoot_capped(mid, m, n, h, cap);
        if (close(pm)) return pm;
        if (pm.mass < mass) {
            lo = mid;
            p_lo = std::move(pm);
        } else {
            hi = mid;
            p_hi = std::move(pm);
        }
        if (p_hi.mass - p_lo.mass < 1e-3 * mass) break;
    }
    for (; it < opts.max_iterations; ++it) {
        double next = lo + (mass - p_lo.mass) * (hi - lo) / (p_hi.mass - p_lo.mass);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        auto pm = shoot_capped(next, m, n, h, cap);
        if (close(pm)) return pm;
        if (pm.mass < mass) {
            lo = next;
            p_lo = std::move(pm);
        } else {
            hi = next;
            p_hi = std::move(pm);
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    }
    const auto& best = std::abs(p_lo.mass - mass) < std::abs(p_hi.mass - mass) ? p_lo : p_hi;
    std::ostringstream os;
    os << "solve_for_mass: no convergence, |mass - M|/M = " << std::abs(best.mass - mass) / mass;
    throw Error(os.str());
}

UvTrajectory uv_trajectory(const StationaryProfile& p, double tol) {
    UvTrajectory out;
    const double m = p.m;
    const int n = p.n;
    const double ex = 1.0 / (m - 1.0);
    const double sub = (m - 1.0) / (m * n) * std::pow(p.alpha, 2.0 - m);
    for (std::size_t i = 1; i + 1 < p.r.size(); ++i) {
        const double psi = p.psi[i];
        const double d = p.dpsi[i];
        if (!(psi > tol) || !(std::abs(d) > tol)) continue;
        const double r = p.r[i];
        // u = r Phi'/Phi with Phi = r^(n-1) Psi', so u -> n at the origin.
        UvSample s{r, -((m - 1.0) / m) * r * std::pow(psi, ex) / d, -r * d / psi};
        out.u_in_range = out.u_in_range && s.u > 0.0 && s.u < n;
        out.v_positive = out.v_positive && s.v > 0.0;
        out.u_plus_v_exceeds_n = out.u_plus_v_exceeds_n && s.u + s.v / (m - 1.0) > n;
        out.v_above_subsolution = out.v_above_subsolution && s.v >= sub * r * r * (1.0 - 1e-12);
        out.samples.push_back(s);
    }
    return out;
}

std::pair<double, double> alpha_bound(double mass, int n) {
    if (!(mass > 0.0)) throw Error("alpha_bound: mass must be positive");
    if (n < 3) throw Error("alpha_bound: n must be >= 3");
    const double q = mass / (n * (n - 2) * unit_ball_volume(n));
    const double y = 0.5 * (1.0 + std::sqrt(1.0 + 8.0 * q));
    return {y, y + 2.0 * q};
}

double rstar_bound(double mass, int n) {
    const double apm = alpha_bound(mass, n).second;
    return softplus(std::sqrt(2.0 * n * (n - 1) * apm));
}

double limit_radius(double mass, int n) {
    if (!(mass > 0.0)) throw Error("limit_radius: mass must be positive");
    return std::pow(mass / unit_ball_volume(n), 1.0 / n);
}

DensityField resample_density(const StationaryProfile& p, const RadialGrid& grid) {
    if (grid.n_dim() != p.n) throw Error("resample: grid dimension differs from the profile");
    std::vector<double> v(grid.cells());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = p.density_at(grid.center(i));
    return {grid, std::move(v)};
}

PressureField resample_pressure(const StationaryProfile& p, const RadialGrid& grid) {
    if (grid.n_dim() != p.n) throw Error("resample: grid dimension differs from the profile");
    std::vector<double> v(grid.cells());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = p.pressure_at(grid.center(i));
    return {grid, std::move(v), p.m};
}

double stationary_residual(const DensityField& rho, const PressureField& p, double support) {
    const auto& g = rho.grid;
    const auto u = potential_gradient(rho);
    const double dr = g.dr();
    double worst = 0.0;
    for (std::size_t j = 1; j < g.cells(); ++j) {
        if (g.face(j + 1) > support) break;
        worst = std::max(worst, std::abs((p.values[j] - p.values[j - 1]) / dr + u[j]));
    }
    return worst;
}

double stationary_residual(const StationaryProfile& p, const RadialGrid& grid) {
    return stationary_residual(resample_density(p, grid), resample_pressure(p, grid), p.support_radius);
}

}  // namespace pks
