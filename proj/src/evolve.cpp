#include "pks/evolve.hpp"

#include "pks/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pks {

namespace {

struct FluxWorkspace {
    std::vector<double> rho_m;
    std::vector<double> u;
    std::vector<double> flux;
    std::size_t active = 0;  // cells [0, active) can change this step
    double max_diffusivity = 0.0;
    double max_drift = 0.0;
};

void prepare(const EvolutionState& s, const EvolveOptions& opts, FluxWorkspace& ws) {
    const auto& g = s.rho.grid;
    const auto& rho = s.rho.values;
    const std::size_t nc = g.cells();

    std::size_t last = 0;
    bool any = false;
    for (std::size_t i = nc; i-- > 0;)
        if (rho[i] > 0.0) {
            last = i;
            any = true;
            break;
        }
    ws.active = any ? std::min(nc, last + 2) : 0;
    ws.rho_m.assign(nc, 0.0);
    ws.u.assign(nc + 1, 0.0);
    ws.max_diffusivity = 0.0;
    ws.max_drift = 0.0;

    const double m = s.m;
    double mass = 0.0;
    for (std::size_t i = 0; i < ws.active; ++i) {
        const double r = rho[i];
        if (r > 0.0) {
            const double rm1 = std::pow(r, m - 1.0);
            ws.rho_m[i] = rm1 * r;
            ws.max_diffusivity = std::max(ws.max_diffusivity, m * rm1);
        }
        if (opts.attraction) {
            mass += r * g.volume(i);
            const double u = mass / g.face_area(i + 1);
            ws.u[i + 1] = u;
            ws.max_drift = std::max(ws.max_drift, u);
        }
    }
}

void apply(const EvolutionState& s, double dt, FluxWorkspace& ws, EvolutionState& out) {
    const auto& g = s.rho.grid;
    const auto& rho = s.rho.values;
    const std::size_t nc = g.cells();
    const double dr = g.dr();

    ws.flux.assign(nc + 1, 0.0);
    // Face j separates cells j-1 and j. Drift u >= 0 points inward, so the
    // upwind density is the outer cell.
    const std::size_t last_face = std::min(ws.active, nc - 1);
    for (std::size_t j = 1; j <= last_face; ++j)
        ws.flux[j] = g.face_area(j) * ((ws.rho_m[j] - ws.rho_m[j - 1]) / dr + rho[j] * ws.u[j]);

    auto& next = out.rho.values;
    std::copy(rho.begin() + static_cast<std::ptrdiff_t>(ws.active), rho.end(),
              next.begin() + static_cast<std::ptrdiff_t>(ws.active));
    for (std::size_t i = 0; i < ws.active; ++i) {
        double v = rho[i] + dt / g.volume(i) * (ws.flux[i + 1] - ws.flux[i]);
        if (v < 0.0) {
            out.clipped_mass += -v * g.volume(i);
            ++out.clip_count;
            v = 0.0;
        }
        next[i] = v;
    }
}

void check_after_step(const EvolutionState& s, const EvolveOptions& opts, std::size_t active) {
    const auto& g = s.rho.grid;
    for (std::size_t i = 0; i < active; ++i)
        if (!std::isfinite(s.rho.values[i])) {
            std::ostringstream os;
            os << "non-finite density in cell " << i << " at t=" << s.t;
            throw StepError(os.str());
        }
    for (std::size_t i = active; i-- > 0;)
        if (s.rho.values[i] > opts.support_tol) {
            if (g.face(i + 1) > opts.support_margin * g.r_max()) {
                std::ostringstream os;
                os << "support reached r=" << g.face(i + 1) << " beyond " << opts.support_margin
                   << "*r_max at t=" << s.t << "; enlarge the domain";
                throw StepError(os.str());
            }
            break;
        }
}

double raw_dt(const FluxWorkspace& ws, const EvolutionState& s, const EvolveOptions& opts) {
    const double dr = s.rho.grid.dr();
    double dt = std::numeric_limits<double>::infinity();
    if (ws.max_diffusivity > 0.0) dt = std::min(dt, opts.cfl_diffusion * dr * dr / ws.max_diffusivity);
    if (ws.max_drift > 0.0) dt = std::min(dt, opts.cfl_advection * dr / ws.max_drift);
    return dt;
}

}  // namespace

EvolutionState make_state(DensityField rho, double m, double t0) {
    if (!(m > 1.0)) throw Error("evolution requires m > 1");
    EvolutionState s;
    s.t = t0;
    s.m = m;
    s.max_density_seen = rho.max();
    const auto u = potential_gradient(rho);
    s.max_drift_seen = u.empty() ? 0.0 : *std::max_element(u.begin(), u.end());
    s.rho = std::move(rho);
    return s;
}

void EvolveOptions::validate() const {
    if (!(cfl_diffusion > 0.0 && cfl_diffusion <= 0.5)) throw Error("cfl_diffusion must lie in (0, 1/2]");
    if (!(cfl_advection > 0.0 && cfl_advection <= 1.0)) throw Error("cfl_advection must lie in (0, 1]");
    if (!(support_margin > 0.0 && support_margin <= 1.0)) throw Error("support_margin must lie in (0, 1]");
    if (!(support_tol > 0.0)) throw Error("support_tol must be positive");
    if (!std::isfinite(t_end)) throw Error("t_end must be finite");
}

double stable_dt(const EvolutionState& state, const EvolveOptions& opts) {
    FluxWorkspace ws;
    prepare(state, opts, ws);
    const double remaining = std::max(0.0, opts.t_end - state.t);
    return std::min(raw_dt(ws, state, opts), remaining);
}

EvolutionState step(const EvolutionState& state, double dt, const EvolveOptions& opts) {
    FluxWorkspace ws;
    prepare(state, opts, ws);
    const double limit = raw_dt(ws, state, opts);
    if (!(dt >= 0.0) || dt > limit * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "CFL violation: dt=" << dt << " exceeds stable dt=" << limit;
        throw StepError(os.str());
    }
    EvolutionState out = state;
    apply(state, dt, ws, out);
    out.t = state.t + dt;
    out.dt_last = dt;
    ++out.step_count;
    out.max_drift_seen = std::max(out.max_drift_seen, ws.max_drift);
    out.max_density_seen = std::max(out.max_density_seen, out.rho.max());
    check_after_step(out, opts, ws.active);
    return out;
}

EvolveResult evolve(EvolutionState state, const EvolveOptions& opts, const Observer& observer) {
    opts.validate();
    std::vector<double> times;
    for (double t : opts.snapshot_times)
        if (t >= state.t && t <= opts.t_end) times.push_back(t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    EvolveResult result;
    std::size_t next_snap = 0;
    auto take_snapshots = [&] {
        while (next_snap < times.size() && times[next_snap] <= state.t) {
            result.snapshots.push_back(state);
            if (observer) observer(state);
            ++next_snap;
        }
    };
    take_snapshots();

    FluxWorkspace ws;
    EvolutionState next = state;
    while (state.t < opts.t_end) {
        prepare(state, opts, ws);
        double target = opts.t_end;
        if (next_snap < times.size()) target = std::min(target, times[next_snap]);
        double dt = std::min(raw_dt(ws, state, opts), target - state.t);
        bool landed = false;
        // Land exactly on the target instead of leaving a sliver step.
        if (dt >= (target - state.t) * (1.0 - 1e-12)) {
            dt = target - state.t;
            landed = true;
        }
        next.clipped_mass = state.clipped_mass;
        next.clip_count = state.clip_count;
        apply(state, dt, ws, next);
        next.t = landed ? target : state.t + dt;
        next.dt_last = dt;
        next.step_count = state.step_count + 1;
        next.max_drift_seen = std::max(state.max_drift_seen, ws.max_drift);
        double mx = 0.0;
        for (std::size_t i = 0; i < ws.active; ++i) mx = std::max(mx, next.rho.values[i]);
        next.max_density_seen = std::max(state.max_density_seen, mx);
        check_after_step(next, opts, ws.active);
        std::swap(state, next);
        take_snapshots();
    }
    result.state = std::move(state);
    return result;
}

}  // namespace pks
