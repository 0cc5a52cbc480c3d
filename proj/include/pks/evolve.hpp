#pragma once

#include <functional>
#include <vector>

#include "pks/radial_core.hpp"

namespace pks {

struct EvolutionState {
    double t = 0.0;
    DensityField rho;
    double m = 2.0;
    long long step_count = 0;
    double dt_last = 0.0;

    // Conservation audit.
    double clipped_mass = 0.0;
    long long clip_count = 0;
    // Running sup over the run of ||rho||_inf and ||u||_inf (for the support barrier).
    double max_density_seen = 0.0;
    double max_drift_seen = 0.0;
};

EvolutionState make_state(DensityField rho, double m, double t0 = 0.0);

struct EvolveOptions {
    double t_end = 0.0;
    double cfl_diffusion = 0.25;
    double cfl_advection = 0.5;
    std::vector<double> snapshot_times;
    double support_margin = 0.9;
    double support_tol = 1e-10;
    // Newtonian self-attraction; off gives the plain porous medium equation.
    bool attraction = true;

    void validate() const;
};

struct StepError : Error {
    using Error::Error;
};

double stable_dt(const EvolutionState& state, const EvolveOptions& opts);

// One explicit conservative update; throws StepError on CFL violation,
// non-finite values or support reaching support_margin * r_max.
EvolutionState step(const EvolutionState& state, double dt, const EvolveOptions& opts);

using Observer = std::function<void(const EvolutionState&)>;

struct EvolveResult {
    EvolutionState state;
    std::vector<EvolutionState> snapshots;
};

// Steps to opts.t_end, landing exactly on every snapshot time. The observer
// (optional) sees each snapshot as it is taken; snapshots are also returned.
EvolveResult evolve(EvolutionState state, const EvolveOptions& opts, const Observer& observer = {});

}  // namespace pks
