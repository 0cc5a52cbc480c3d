#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pks/evolve.hpp"
#include "pks/radial_core.hpp"

namespace pks {

// F_m = 1/(m-1) int rho^m + 1/2 int rho N*rho
double free_energy(const DensityField& rho, double m);

// int rho |d_r(P + N*rho)|^2 with the pressure taken from the power law.
double dissipation(const DensityField& rho, double m);
// Same functional for an explicitly supplied pressure (e.g. a limit pair).
double dissipation(const DensityField& rho, const PressureField& p);

struct AbQuantities {
    std::vector<double> omega;  // Delta P + rho per cell
    double neg_l1 = 0.0;        // || |omega|_- ||_1
    double neg_l3_cubed = 0.0;  // || |omega|_- ||_3^3
};

// Zero-flux radial Laplacian of P plus rho.
std::vector<double> radial_laplacian(const RadialGrid& grid, std::span<const double> p);
AbQuantities ab_quantities(const DensityField& rho, const PressureField& p);

struct GradNorms {
    double l2 = 0.0;
    double l3 = 0.0;
};
GradNorms gradP_norms(const PressureField& p);

// Radial test profile zeta(r).
using TestProfile = std::function<double(double)>;
// (1 - (r/radius)^2)_+^2
TestProfile bump_test_profile(double radius);

// sum P_i omega_i zeta_i v_i; the default profile is bump_test_profile(r_max).
double complementarity_residual(const DensityField& rho, const PressureField& p,
                                const TestProfile& zeta = {});

inline constexpr double kDefaultSupportTol = 1e-10;

// Outer face of the outermost cell with rho > tol; 0 when no cell qualifies.
double support_radius(const DensityField& rho, double tol = kDefaultSupportTol);

// (R0 + n*d/A) exp(A t / n) - n*d/A
double barrier_radius(double t, double r0, double drift_sup, int n, double a);

struct PressureSnapshot {
    double t = 0.0;
    PressureField p;
};
// sum_k sum_i |P_i(t_{k+1}) - P_i(t_k)| v_i
double dtP_l1(std::span<const PressureSnapshot> snapshots);

struct LqNorms {
    double l1 = 0.0;
    double l2 = 0.0;
    double l_m_plus_1 = 0.0;
    double l_inf = 0.0;
};

struct EstimateReport {
    double t = 0.0;
    double mass = 0.0;
    LqNorms lq_norms;
    double excess_l2 = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;
    double omega_neg_l1 = 0.0;
    double omega_neg_l3_cubed = 0.0;
    double gradP_l2 = 0.0;
    double gradP_l3 = 0.0;
    double comp_residual = 0.0;
    double support_radius = 0.0;
    double barrier_radius = 0.0;
    // Step size in force when the snapshot was taken.
    double dt = 0.0;

    bool all_finite() const;
};

// Column names of the flattened report, in CSV order.
const std::vector<std::string>& report_columns();
std::vector<double> report_values(const EstimateReport& r);

// Run-level constants of the support barrier: R0, sup |u| and A = max(sup rho, 1) over the run.
struct BarrierParams {
    double r0 = 0.0;
    double drift_sup = 0.0;
    double a = 1.0;
};

BarrierParams barrier_params(const DensityField& rho0, const EvolutionState& final_state);

EstimateReport make_report(const EvolutionState& s, const BarrierParams& barrier,
                           const TestProfile& zeta = {});

}  // namespace pks
