#pragma once

#include <span>
#include <vector>

#include "pks/radial_core.hpp"

namespace pks {

// Radial Newtonian potential of a density. Face-indexed arrays have
// grid.cells()+1 entries (face 0 is the origin); value is cell-indexed.
struct PotentialData {
    RadialGrid grid;
    std::vector<double> cum_mass;
    std::vector<double> grad;
    std::vector<double> value;
    // Set when the support reaches the outer 10% of the domain, where the
    // far-field anchor of `value` degrades.
    bool far_field_warning = false;
};

std::vector<double> cumulative_mass(const RadialGrid& grid, std::span<const double> rho);
std::vector<double> cumulative_mass(const DensityField& rho);

// u(r) = M(r) / |dB_r|, the radial derivative of N*rho (N the Newtonian kernel).
std::vector<double> potential_gradient(const RadialGrid& grid, std::span<const double> rho);
std::vector<double> potential_gradient(const DensityField& rho);

// N*rho at cell centres, anchored at r_max by -M/(n(n-2) w_n r_max^(n-2)).
std::vector<double> potential_value(const DensityField& rho, bool* far_field_warning = nullptr);

PotentialData compute_potential(const DensityField& rho);

// || grad N*(rho1 - rho2) ||_2 for equal-mass densities.
double h_minus_one_distance(const DensityField& rho1, const DensityField& rho2);

}  // namespace pks
