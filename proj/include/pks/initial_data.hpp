#pragma once

#include "pks/radial_core.hpp"

namespace pks {

// amplitude * (1 - (r/radius)^2)_+^2 sampled at cell centres.
DensityField bump_density(const RadialGrid& grid, double amplitude, double radius);

// Indicator of B_R as exact cell volume fractions, so the mass is w_n R^n.
DensityField patch_density(const RadialGrid& grid, double radius);

// Barenblatt self-similar solution of rho_t = Laplacian(rho^m) in R^n:
//   t^-a (C - k r^2 t^(-2a/n))_+^(1/(m-1)), a = n/(n(m-1)+2), k = a(m-1)/(2mn).
double barenblatt(double r, double t, double m, int n, double c);
// Cell averages of the Barenblatt profile (Gauss-Legendre per cell).
DensityField barenblatt_density(const RadialGrid& grid, double t, double m, double c);
// Support radius of the Barenblatt profile at time t.
double barenblatt_radius(double t, double m, int n, double c);

}  // namespace pks
