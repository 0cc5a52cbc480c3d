#include "pks/limit_sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "pks/initial_data.hpp"
#include "pks/potential.hpp"

namespace pks {

FitResult fit_rate(std::span<const double> xs, std::span<const double> ys, double floor) {
    if (xs.size() != ys.size()) throw Error("fit_rate: xs and ys differ in length");
    if (xs.size() < 4) throw Error("fit_rate: need at least 4 points");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0)) throw Error("fit_rate: xs must be positive");
        if (i > 0 && !(xs[i] > xs[i - 1])) throw Error("fit_rate: xs must be strictly increasing");
    }
    FitResult f;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double y = ys[i] - floor;
        if (!(y > 0.0)) {
            f.floor_limited = true;
            f.slope = f.r2 = std::numeric_limits<double>::quiet_NaN();
            return f;
        }
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(y));
    }
    const double k = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    f.slope = sxy / sxx;
    // A constant series is fitted exactly by slope 0.
    f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return f;
}

PressureField patch_pressure(double radius, int n, const RadialGrid& grid) {
    if (!(radius > 0.0) || !(radius < grid.r_max())) throw Error("patch_pressure: need 0 < R < r_max");
    std::vector<double> p(grid.cells());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = grid.center(i);
        p[i] = std::max(radius * radius - r * r, 0.0) / (2.0 * n);
    }
    return {grid, std::move(p), std::numeric_limits<double>::infinity()};
}

PatchFloor measure_patch_floor(const RadialGrid& grid, double radius) {
    const auto rho = patch_density(grid, radius);
    const auto p = patch_pressure(radius, grid.n_dim(), grid);
    const auto ab = ab_quantities(rho, p);
    PatchFloor f;
    f.excess_l2 = excess_above_one(rho);
    f.omega_neg_l1 = ab.neg_l1;
    f.omega_neg_l3_cubed = ab.neg_l3_cubed;
    f.comp_residual = std::abs(complementarity_residual(rho, p));
    f.dissipation = dissipation(rho, p);
    return f;
}

std::vector<double> uniform_times(double t_end, int count) {
    if (count < 1) throw Error("snapshot count must be >= 1");
    std::vector<double> t(count);
    for (int k = 1; k <= count; ++k) t[k - 1] = t_end * k / count;
    t.back() = t_end;
    return t;
}

namespace {

double trapezoid(const std::vector<EstimateReport>& s, double EstimateReport::*field) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
        acc += 0.5 * (s[k].*field + s[k + 1].*field) * (s[k + 1].t - s[k].t);
    return acc;
}

}  // namespace

EvolutionSummary run_evolution(const DensityField& rho0, double m, double t_end, int snapshots,
                               double cfl_diffusion, double cfl_advection, const Observer& observer) {
    EvolutionSummary out;
    out.m = m;
    out.initial_mass = rho0.total_mass();
    const auto start = std::chrono::steady_clock::now();
    try {
        EvolveOptions opts;
        opts.t_end = t_end;
        opts.cfl_diffusion = cfl_diffusion;
        opts.cfl_advection = cfl_advection;
        opts.snapshot_times = uniform_times(t_end, snapshots);
        auto s0 = make_state(rho0, m);
        auto res = evolve(s0, opts, observer);

        const auto barrier = barrier_params(rho0, res.state);
        std::vector<PressureSnapshot> ps;
        out.series.push_back(make_report(s0, barrier));
        ps.push_back({s0.t, pressure_from_density(s0.rho, m)});
        for (const auto& s : res.snapshots) {
            out.series.push_back(make_report(s, barrier));
            ps.push_back({s.t, pressure_from_density(s.rho, m)});
        }
        const auto& fin = res.state;
        out.final_mass = fin.rho.total_mass();
        out.mass_drift_rel = std::abs(out.final_mass - out.initial_mass) / out.initial_mass;
        out.clipped_mass = fin.clipped_mass;
        out.steps = fin.step_count;

        const auto& last = out.series.back();
        out.excess_l2_final = last.excess_l2;
        out.comp_residual_final = std::abs(last.comp_residual);
        out.omega_neg_l1_qt = trapezoid(out.series, &EstimateReport::omega_neg_l1);
        out.omega_neg_l3_cubed_qt = trapezoid(out.series, &EstimateReport::omega_neg_l3_cubed);
        std::vector<EstimateReport> cubes = out.series;
        for (auto& r : cubes) r.gradP_l3 = std::pow(r.gradP_l3, 3);
        out.gradP_l3_qt = std::cbrt(trapezoid(cubes, &EstimateReport::gradP_l3));
        out.dtP_l1 = dtP_l1(ps);

        out.energy_excess = -std::numeric_limits<double>::infinity();
        out.barrier_ok = true;
        for (std::size_t k = 0; k < out.series.size(); ++k) {
            const auto& r = out.series[k];
            if (r.support_radius > r.barrier_radius) out.barrier_ok = false;
            if (k == 0) continue;
            const auto& q = out.series[k - 1];
            const double tol = 1e-8 + 10.0 * std::max(q.dt * q.dissipation, r.dt * r.dissipation);
            out.energy_excess = std::max(out.energy_excess, r.energy - q.energy - tol);
        }
        out.energy_ok = !(out.energy_excess > 0.0);
        out.ok = true;
        for (const auto& r : out.series)
            if (!r.all_finite()) {
                out.ok = false;
                out.error = "non-finite estimate";
            }
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

namespace {

void check_m_values(const std::vector<double>& ms, double lowest) {
    if (ms.empty()) throw Error("m_values must not be empty");
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (!(ms[i] >= lowest)) throw Error("m_values must be >= " + std::to_string(lowest));
        if (i > 0 && !(ms[i] > ms[i - 1])) throw Error("m_values must be strictly increasing");
    }
}

void add_fit(SweepResult& out, const std::string& name, const std::vector<double>& ys, double floor) {
    out.fitted_slopes[name] = fit_rate(out.m_values, ys, floor);
}

}  // namespace

SweepResult run_evolution_sweep(const EvolutionSweepConfig& cfg) {
    check_m_values(cfg.m_values, 3.0);
    SweepResult out;
    out.kind = "evolution";
    out.grid = cfg.initial.grid;
    out.n = out.grid.n_dim();
    out.m_values = cfg.m_values;
    for (double m : cfg.m_values)
        out.evolution.push_back(
            run_evolution(cfg.initial, m, cfg.t_end, cfg.snapshots, cfg.cfl_diffusion, cfg.cfl_advection));

    auto& ref = out.references;
    ref.mass = cfg.initial.total_mass();
    ref.limit_radius = limit_radius(ref.mass, out.n);
    const auto ab = alpha_bound(ref.mass, out.n);
    ref.alpha_max = ab.first;
    ref.alpha_pow_max = ab.second;
    ref.rstar = rstar_bound(ref.mass, out.n);
    if (ref.limit_radius < out.grid.r_max()) ref.floor = measure_patch_floor(out.grid, ref.limit_radius);

    const bool all_ok = std::all_of(out.evolution.begin(), out.evolution.end(), [](auto& e) { return e.ok; });
    if (out.m_values.size() >= 4 && all_ok) {
        auto pick = [&](double EvolutionSummary::*f) {
            std::vector<double> v;
            for (const auto& e : out.evolution) v.push_back(e.*f);
            return v;
        };
        const double t_end = cfg.t_end;
        add_fit(out, "excess_l2", pick(&EvolutionSummary::excess_l2_final), ref.floor.excess_l2);
        add_fit(out, "omega_neg_l3_cubed", pick(&EvolutionSummary::omega_neg_l3_cubed_qt),
                t_end * ref.floor.omega_neg_l3_cubed);
        add_fit(out, "omega_neg_l1", pick(&EvolutionSummary::omega_neg_l1_qt), t_end * ref.floor.omega_neg_l1);
        add_fit(out, "gradP_l3", pick(&EvolutionSummary::gradP_l3_qt), 0.0);
        add_fit(out, "dtP_l1", pick(&EvolutionSummary::dtP_l1), 0.0);
        add_fit(out, "comp_residual", pick(&EvolutionSummary::comp_residual_final), ref.floor.comp_residual);
    }
    return out;
}

StationarySummary summarize_stationary(const StationaryProfile& p, double mass, const RadialGrid& grid,
                                       double mass_tol) {
    StationarySummary s;
    const int n = p.n;
    s.m = p.m;
    s.alpha = p.alpha;
    s.support_radius = p.support_radius;
    s.mass = p.mass;
    s.mass_error_rel = std::abs(p.mass - mass) / mass;
    const double rlim = limit_radius(mass, n);
    s.radius_gap = std::abs(p.support_radius - rlim);

    const auto ab = alpha_bound(mass, n);
    s.alpha_ok = p.alpha <= ab.first && std::pow(p.alpha, p.m - 1.0) <= ab.second;
    s.uv_ok = uv_trajectory(p).all();
    s.radius_ok = p.support_radius <= rstar_bound(mass, n);

    const auto rho = resample_density(p, grid);
    const auto pr = resample_pressure(p, grid);
    const auto chi = patch_density(grid, rlim);
    const auto pinf = patch_pressure(rlim, n, grid);
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        s.l1_to_patch += std::abs(rho.values[i] - chi.values[i]) * grid.volume(i);
        s.pressure_gap = std::max(s.pressure_gap, std::abs(pr.values[i] - pinf.values[i]));
    }
    const auto q = ab_quantities(rho, pr);
    s.omega_neg_l1 = q.neg_l1;
    s.omega_neg_l3_cubed = q.neg_l3_cubed;
    s.residual = stationary_residual(rho, pr, p.support_radius);
    s.density = rho.values;
    s.pressure = pr.values;
    s.ok = s.mass_error_rel <= mass_tol && s.alpha_ok && s.uv_ok && s.radius_ok;
    if (!s.ok) s.error = "bound check failed";
    return s;
}

SweepResult run_stationary_sweep(const StationarySweepConfig& cfg) {
    check_m_values(cfg.m_values, 3.0);
    if (!(cfg.mass > 0.0)) throw Error("stationary sweep: mass must be positive");
    SweepResult out;
    out.kind = "stationary";
    out.n = cfg.n;
    out.m_values = cfg.m_values;
    auto& ref = out.references;
    ref.mass = cfg.mass;
    ref.limit_radius = limit_radius(cfg.mass, cfg.n);
    const auto ab = alpha_bound(cfg.mass, cfg.n);
    ref.alpha_max = ab.first;
    ref.alpha_pow_max = ab.second;
    ref.rstar = rstar_bound(cfg.mass, cfg.n);
    // R_* bounds every support radius, so one grid holds all profiles.
    out.grid = RadialGrid(cfg.n, ref.rstar, cfg.cells);
    ref.floor = measure_patch_floor(out.grid, ref.limit_radius);

    for (double m : cfg.m_values) {
        try {
            const auto p = solve_for_mass(cfg.mass, m, cfg.n, cfg.solve);
            out.stationary.push_back(summarize_stationary(p, cfg.mass, out.grid, cfg.solve.rel_tol));
        } catch (const std::exception& e) {
            StationarySummary s;
            s.m = m;
            s.error = e.what();
            out.stationary.push_back(s);
        }
    }

    const bool all_ok = std::all_of(out.stationary.begin(), out.stationary.end(), [](auto& s) { return s.ok; });
    if (out.m_values.size() >= 4 && all_ok) {
        auto pick = [&](double StationarySummary::*f) {
            std::vector<double> v;
            for (const auto& s : out.stationary) v.push_back(s.*f);
            return v;
        };
        add_fit(out, "radius_gap", pick(&StationarySummary::radius_gap), 0.0);
        add_fit(out, "l1_to_patch", pick(&StationarySummary::l1_to_patch), 0.0);
        add_fit(out, "pressure_gap", pick(&StationarySummary::pressure_gap), 0.0);
        add_fit(out, "omega_neg_l3_cubed", pick(&StationarySummary::omega_neg_l3_cubed),
                ref.floor.omega_neg_l3_cubed);
    }
    return out;
}

UniquenessProbe uniqueness_probe(const DensityField& rho_a, const DensityField& rho_b, double m, double t_end,
                                 int snapshots) {
    // Checks the masses up front with the same rule as the distance itself.
    UniquenessProbe out;
    out.t.push_back(0.0);
    out.distance.push_back(h_minus_one_distance(rho_a, rho_b));

    EvolveOptions opts;
    opts.t_end = t_end;
    opts.snapshot_times = uniform_times(t_end, snapshots);
    const auto ra = evolve(make_state(rho_a, m), opts);
    const auto rb = evolve(make_state(rho_b, m), opts);
    for (std::size_t k = 0; k < ra.snapshots.size(); ++k) {
        out.t.push_back(ra.snapshots[k].t);
        out.distance.push_back(h_minus_one_distance(ra.snapshots[k].rho, rb.snapshots[k].rho));
    }
    for (std::size_t k = 0; k + 1 < out.distance.size(); ++k) {
        const double a = out.distance[k];
        const double b = out.distance[k + 1];
        const double scale = std::max(a, b);
        if (scale > 0.0) out.max_jump = std::max(out.max_jump, std::abs(b - a) / scale);
    }
    out.grew_tenfold = out.distance.back() > 10.0 * out.distance.front();
    return out;
}

}  // namespace pks
