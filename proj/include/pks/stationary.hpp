#pragma once

#include <utility>
#include <vector>

#include "pks/radial_core.hpp"

namespace pks {

// Radial stationary state parametrised by Psi = rho^(m-1), which solves
//   Psi'' + (n-1)/r Psi' = -((m-1)/m) Psi^(1/(m-1)),  Psi(0) = alpha^(m-1), Psi'(0) = 0
// up to its first zero R_m.
struct StationaryProfile {
    double m = 3.0;
    int n = 3;
    double alpha = 0.0;
    double dr_ode = 0.0;
    // ODE mesh r_k = k*dr_ode, ending at the first node with Psi <= 0.
    std::vector<double> r;
    std::vector<double> psi;
    std::vector<double> dpsi;
    double support_radius = 0.0;
    double mass = 0.0;
    // Near the zero rho = Psi^(1/(m-1)) is not smooth in r, so the stretch past
    // node edge_node is integrated with rho as the variable instead; these are
    // its results (mass in [r[edge_node], R] and r^(n-1) Psi' at R).
    std::size_t edge_node = 0;
    double tail_mass = 0.0;
    double edge_flux = 0.0;

    // Cubic Hermite interpolation of Psi; 0 at and beyond the support radius.
    double psi_at(double radius) const;
    double density_at(double radius) const;
    double pressure_at(double radius) const { return m / (m - 1.0) * psi_at(radius); }
};

StationaryProfile shoot(double alpha, double m, int n, double dr_ode);

// n w_n int_0^R r^(n-1) Psi^(1/(m-1)) dr: composite Simpson on the ODE mesh up
// to edge_node plus the tail mass of the edge integration.
double mass_of_profile(const StationaryProfile& p);

// Same mass from the flux identity M = -n w_n m/(m-1) R^(n-1) Psi'(R).
double mass_from_flux(const StationaryProfile& p);

// Default ODE step: rstar_bound(M, n) / 20000.
double default_dr_ode(double mass, int n);

struct SolveOptions {
    double rel_tol = 1e-8;
    double dr_ode = 0.0;  // 0 selects default_dr_ode
    int max_iterations = 200;
};

StationaryProfile solve_for_mass(double mass, double m, int n, const SolveOptions& opts = {});

struct UvSample {
    double r = 0.0;
    double u = 0.0;
    double v = 0.0;
};

struct UvTrajectory {
    std::vector<UvSample> samples;
    bool u_in_range = true;         // 0 < u < n
    bool v_positive = true;         // v > 0
    bool u_plus_v_exceeds_n = true; // u + v/(m-1) > n
    bool v_above_subsolution = true; // v >= (m-1)/(mn) alpha^(2-m) r^2
    bool all() const { return u_in_range && v_positive && u_plus_v_exceeds_n && v_above_subsolution; }
};

UvTrajectory uv_trajectory(const StationaryProfile& p, double tol = 1e-12);

// First: bound on alpha = rho(0); second: bound on alpha^(m-1).
std::pair<double, double> alpha_bound(double mass, int n);

// Uniform support radius R_*(M).
double rstar_bound(double mass, int n);

// Radius of the ball of volume M.
double limit_radius(double mass, int n);

// Point samples at cell centres: rho_i = Psi(r_i)^(1/(m-1)), P_i = m/(m-1) Psi(r_i).
DensityField resample_density(const StationaryProfile& p, const RadialGrid& grid);
PressureField resample_pressure(const StationaryProfile& p, const RadialGrid& grid);

// sup |(P_{j} - P_{j-1})/dr + u_j| over faces whose neighbouring cells both
// lie entirely inside the support.
double stationary_residual(const DensityField& rho, const PressureField& p, double support_radius);
double stationary_residual(const StationaryProfile& p, const RadialGrid& grid);

}  // namespace pks
