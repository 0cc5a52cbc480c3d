#include "pks/estimates.hpp"

#include <algorithm>
#include <cmath>

#include "pks/potential.hpp"

namespace pks {

double free_energy(const DensityField& rho, double m) {
    if (!(m > 1.0)) throw Error("free_energy requires m > 1");
    const auto& g = rho.grid;
    const auto phi = potential_value(rho);
    double entropy = 0.0;
    double interaction = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i) {
        const double r = rho.values[i];
        if (r == 0.0) continue;
        entropy += std::pow(r, m) * g.volume(i);
        interaction += r * phi[i] * g.volume(i);
    }
    return entropy / (m - 1.0) + 0.5 * interaction;
}

double dissipation(const DensityField& rho, const PressureField& p) {
    const auto& g = rho.grid;
    if (!(g == p.grid)) throw Error("dissipation: fields live on different grids");
    const auto u = potential_gradient(rho);
    const double dr = g.dr();
    double s = 0.0;
    for (std::size_t j = 1; j < g.cells(); ++j) {
        const double up = rho.values[j];
        if (up == 0.0) continue;
        const double v = (p.values[j] - p.values[j - 1]) / dr + u[j];
        s += up * v * v * g.face_area(j) * dr;
    }
    return s;
}

double dissipation(const DensityField& rho, double m) {
    return dissipation(rho, pressure_from_density(rho, m));
}

std::vector<double> radial_laplacian(const RadialGrid& g, std::span<const double> p) {
    const std::size_t nc = g.cells();
    if (p.size() != nc) throw Error("pressure size does not match grid");
    const double dr = g.dr();
    std::vector<double> flux(nc + 1, 0.0);
    for (std::size_t j = 1; j < nc; ++j) flux[j] = g.face_area(j) * (p[j] - p[j - 1]) / dr;
    std::vector<double> lap(nc);
    for (std::size_t i = 0; i < nc; ++i) lap[i] = (flux[i + 1] - flux[i]) / g.volume(i);
    return lap;
}

AbQuantities ab_quantities(const DensityField& rho, const PressureField& p) {
    const auto& g = rho.grid;
    if (!(g == p.grid)) throw Error("ab_quantities: fields live on different grids");
    AbQuantities q;
    q.omega = radial_laplacian(g, p.values);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        q.omega[i] += rho.values[i];
        const double neg = std::max(-q.omega[i], 0.0);
        q.neg_l1 += neg * g.volume(i);
        q.neg_l3_cubed += neg * neg * neg * g.volume(i);
    }
    return q;
}

GradNorms gradP_norms(const PressureField& p) {
    const auto& g = p.grid;
    const double dr = g.dr();
    double s2 = 0.0;
    double s3 = 0.0;
    for (std::size_t j = 1; j < g.cells(); ++j) {
        const double d = std::abs(p.values[j] - p.values[j - 1]) / dr;
        const double w = g.face_area(j) * dr;
        s2 += d * d * w;
        s3 += d * d * d * w;
    }
    return {std::sqrt(s2), std::cbrt(s3)};
}

TestProfile bump_test_profile(double radius) {
    return [radius](double r) {
        const double x = 1.0 - (r / radius) * (r / radius);
        return x > 0.0 ? x * x : 0.0;
    };
}

double complementarity_residual(const DensityField& rho, const PressureField& p, const TestProfile& zeta) {
    const auto& g = rho.grid;
    const TestProfile z = zeta ? zeta : bump_test_profile(g.r_max());
    const auto ab = ab_quantities(rho, p);
    double s = 0.0;
    for (std::size_t i = 0; i < g.cells(); ++i)
        if (p.values[i] != 0.0) s += p.values[i] * ab.omega[i] * z(g.center(i)) * g.volume(i);
    return s;
}

double support_radius(const DensityField& rho, double tol) {
    if (!(tol > 0.0)) throw Error("support_radius requires tol > 0");
    for (std::size_t i = rho.values.size(); i-- > 0;)
        if (rho.values[i] > tol) return rho.grid.face(i + 1);
    return 0.0;
}

double barrier_radius(double t, double r0, double drift_sup, int n, double a) {
    if (!(r0 > 0.0)) throw Error("barrier_radius requires R0 > 0");
    if (!(a >= 1.0)) throw Error("barrier_radius requires A >= 1");
    if (!(drift_sup >= 0.0)) throw Error("barrier_radius requires drift_sup >= 0");
    const double shift = n * drift_sup / a;
    return (r0 + shift) * std::exp(a * t / n) - shift;
}

double dtP_l1(std::span<const PressureSnapshot> snaps) {
    if (snaps.size() < 2) throw Error("dtP_l1 needs at least two snapshots");
    const auto& g = snaps.front().p.grid;
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < snaps.size(); ++k) {
        const auto& a = snaps[k].p.values;
        const auto& b = snaps[k + 1].p.values;
        if (a.size() != g.cells() || b.size() != g.cells()) throw Error("dtP_l1: snapshot grids differ");
        for (std::size_t i = 0; i < g.cells(); ++i) s += std::abs(b[i] - a[i]) * g.volume(i);
    }
    return s;
}

bool EstimateReport::all_finite() const {
    for (double v : report_values(*this))
        if (!std::isfinite(v)) return false;
    return true;
}

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> cols = {
        "t",           "mass",          "lq_norm_1",          "lq_norm_2",        "lq_norm_m_plus_1",
        "lq_norm_inf", "excess_l2",     "energy",             "dissipation",      "omega_neg_l1",
        "omega_neg_l3_cubed", "gradP_l2", "gradP_l3",         "comp_residual",    "support_radius",
        "barrier_radius", "dt"};
    return cols;
}

std::vector<double> report_values(const EstimateReport& r) {
    return {r.t,
            r.mass,
            r.lq_norms.l1,
            r.lq_norms.l2,
            r.lq_norms.l_m_plus_1,
            r.lq_norms.l_inf,
            r.excess_l2,
            r.energy,
            r.dissipation,
            r.omega_neg_l1,
            r.omega_neg_l3_cubed,
            r.gradP_l2,
            r.gradP_l3,
            r.comp_residual,
            r.support_radius,
            r.barrier_radius,
            r.dt};
}

BarrierParams barrier_params(const DensityField& rho0, const EvolutionState& final_state) {
    BarrierParams b;
    b.r0 = 2.0 * support_radius(rho0);
    b.drift_sup = final_state.max_drift_seen;
    b.a = std::max(final_state.max_density_seen, 1.0);
    return b;
}

EstimateReport make_report(const EvolutionState& s, const BarrierParams& barrier, const TestProfile& zeta) {
    const auto& rho = s.rho;
    const auto& g = rho.grid;
    const double m = s.m;
    const auto p = pressure_from_density(rho, m);

    EstimateReport r;
    r.t = s.t;
    r.dt = s.dt_last;
    r.mass = rho.total_mass();
    r.lq_norms = {lp_norm(g, rho.values, 1.0), lp_norm(g, rho.values, 2.0), lp_norm(g, rho.values, m + 1.0),
                  lp_norm(g, rho.values, kInfNorm)};
    r.excess_l2 = excess_above_one(rho);
    r.energy = free_energy(rho, m);
    r.dissipation = dissipation(rho, p);
    const auto ab = ab_quantities(rho, p);
    r.omega_neg_l1 = ab.neg_l1;
    r.omega_neg_l3_cubed = ab.neg_l3_cubed;
    const auto gp = gradP_norms(p);
    r.gradP_l2 = gp.l2;
    r.gradP_l3 = gp.l3;
    r.comp_residual = complementarity_residual(rho, p, zeta);
    r.support_radius = support_radius(rho);
    r.barrier_radius = barrier.r0 > 0.0 ? barrier_radius(s.t, barrier.r0, barrier.drift_sup, g.n_dim(), barrier.a)
                                        : 0.0;
    return r;
}

}  // namespace pks
