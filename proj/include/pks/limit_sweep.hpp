#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pks/estimates.hpp"
#include "pks/evolve.hpp"
#include "pks/radial_core.hpp"
#include "pks/stationary.hpp"

namespace pks {

// Least squares slope of log y against log m.
struct FitResult {
    double slope = 0.0;
    double r2 = 0.0;
    // Some y fell to or below the floor; slope and r2 are NaN.
    bool floor_limited = false;
};

// Requires at least 4 points and increasing positive xs. The floor is
// subtracted from every y before taking logs.
FitResult fit_rate(std::span<const double> xs, std::span<const double> ys, double floor = 0.0);

// Limit pressure of the ball patch: (R^2 - r^2)_+ / (2n) at cell centres.
PressureField patch_pressure(double radius, int n, const RadialGrid& grid);

// Scheme floors measured on the exact patch pair (chi_{B_R}, patch_pressure).
struct PatchFloor {
    double excess_l2 = 0.0;
    double omega_neg_l1 = 0.0;
    double omega_neg_l3_cubed = 0.0;
    double comp_residual = 0.0;
    double dissipation = 0.0;
};
PatchFloor measure_patch_floor(const RadialGrid& grid, double radius);

// Run-level aggregates of one evolution.
struct EvolutionSummary {
    double m = 0.0;
    bool ok = false;
    std::string error;

    std::vector<EstimateReport> series;  // t = 0 followed by every snapshot
    double initial_mass = 0.0;
    double final_mass = 0.0;
    double mass_drift_rel = 0.0;
    double clipped_mass = 0.0;
    long long steps = 0;
    double wall_seconds = 0.0;

    double excess_l2_final = 0.0;
    double comp_residual_final = 0.0;  // absolute value at t_end
    // Space-time integrals over [0, t_end] (trapezoid over snapshots).
    double omega_neg_l1_qt = 0.0;
    double omega_neg_l3_cubed_qt = 0.0;
    // ( int ||grad P||_3^3 dt )^(1/3)
    double gradP_l3_qt = 0.0;
    double dtP_l1 = 0.0;

    // Largest F(t_{k+1}) - F(t_k) - tolerance; <= 0 means no violation.
    double energy_excess = 0.0;
    bool energy_ok = false;
    bool barrier_ok = false;
};

struct StationarySummary {
    double m = 0.0;
    bool ok = false;
    std::string error;

    double alpha = 0.0;
    double support_radius = 0.0;
    double mass = 0.0;
    double mass_error_rel = 0.0;
    double radius_gap = 0.0;     // |R_m - R(M)|
    double l1_to_patch = 0.0;    // || rho_m - chi_{B_R(M)} ||_1
    double pressure_gap = 0.0;   // || P_m - P_inf ||_inf
    double omega_neg_l1 = 0.0;
    double omega_neg_l3_cubed = 0.0;
    double residual = 0.0;       // stationary_residual on the common grid
    bool alpha_ok = false;       // both closed-form bounds
    bool uv_ok = false;
    bool radius_ok = false;      // R_m <= R_*(M)

    // Point samples on the common grid.
    std::vector<double> density;
    std::vector<double> pressure;
};

struct SweepReferences {
    double mass = 0.0;
    double limit_radius = 0.0;
    double alpha_max = 0.0;
    double alpha_pow_max = 0.0;
    double rstar = 0.0;
    PatchFloor floor;
};

struct SweepResult {
    std::string kind;  // "evolution" or "stationary"
    int n = 3;
    std::vector<double> m_values;
    std::vector<EvolutionSummary> evolution;
    std::vector<StationarySummary> stationary;
    // Empty when fewer than 4 m values.
    std::map<std::string, FitResult> fitted_slopes;
    SweepReferences references;
    RadialGrid grid;
};

struct EvolutionSweepConfig {
    DensityField initial;
    std::vector<double> m_values;
    double t_end = 0.5;
    int snapshots = 50;
    double cfl_diffusion = 0.25;
    double cfl_advection = 0.5;
};

// The observer, when given, sees every snapshot state as the run proceeds.
EvolutionSummary run_evolution(const DensityField& rho0, double m, double t_end, int snapshots,
                               double cfl_diffusion = 0.25, double cfl_advection = 0.5,
                               const Observer& observer = {});

SweepResult run_evolution_sweep(const EvolutionSweepConfig& cfg);

struct StationarySweepConfig {
    double mass = 4.0 * 3.14159265358979323846 / 3.0;
    int n = 3;
    std::vector<double> m_values;
    std::size_t cells = 4096;
    SolveOptions solve;
};

SweepResult run_stationary_sweep(const StationarySweepConfig& cfg);

StationarySummary summarize_stationary(const StationaryProfile& p, double mass, const RadialGrid& grid,
                                       double mass_tol = 1e-8);

struct UniquenessProbe {
    std::vector<double> t;
    std::vector<double> distance;
    bool grew_tenfold = false;   // distance(t_end) > 10 distance(0)
    double max_jump = 0.0;       // largest |d_{k+1} - d_k| / max(d_k, d_{k+1})
};

UniquenessProbe uniqueness_probe(const DensityField& rho_a, const DensityField& rho_b, double m, double t_end,
                                 int snapshots = 50);

// Uniform snapshot times t_end k / count, k = 1..count.
std::vector<double> uniform_times(double t_end, int count);

}  // namespace pks
