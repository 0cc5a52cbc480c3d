#include "pks/potential.hpp"

#include <cmath>

namespace pks {

std::vector<double> cumulative_mass(const RadialGrid& grid, std::span<const double> rho) {
    if (rho.size() != grid.cells()) throw Error("density size does not match grid");
    std::vector<double> m(grid.cells() + 1, 0.0);
    for (std::size_t i = 0; i < rho.size(); ++i) m[i + 1] = m[i] + rho[i] * grid.volume(i);
    return m;
}

std::vector<double> cumulative_mass(const DensityField& rho) {
    return cumulative_mass(rho.grid, rho.values);
}

std::vector<double> potential_gradient(const RadialGrid& grid, std::span<const double> rho) {
    auto u = cumulative_mass(grid, rho);
    u[0] = 0.0;
    for (std::size_t j = 1; j < u.size(); ++j) u[j] /= grid.face_area(j);
    return u;
}

std::vector<double> potential_gradient(const DensityField& rho) {
    return potential_gradient(rho.grid, rho.values);
}

std::vector<double> potential_value(const DensityField& rho, bool* far_field_warning) {
    const auto& g = rho.grid;
    const std::size_t nc = g.cells();
    const int n = g.n_dim();
    const auto u = potential_gradient(rho);
    const double mass = rho.total_mass();

    if (far_field_warning) {
        *far_field_warning = false;
        for (std::size_t i = 0; i < nc; ++i)
            if (rho.values[i] > 0.0 && g.face(i + 1) > 0.9 * g.r_max()) {
                *far_field_warning = true;
                break;
            }
    }

    std::vector<double> phi(nc, 0.0);
    if (mass == 0.0) return phi;
    const double anchor = -mass / (n * (n - 2) * g.omega_n() * std::pow(g.r_max(), n - 2));
    const double dr = g.dr();
    // Midpoint rule between neighbouring centres; half a cell from the outer face.
    phi[nc - 1] = anchor - 0.5 * dr * u[nc];
    for (std::size_t i = nc - 1; i-- > 0;) phi[i] = phi[i + 1] - dr * u[i + 1];
    return phi;
}

PotentialData compute_potential(const DensityField& rho) {
    PotentialData d;
    d.grid = rho.grid;
    d.cum_mass = cumulative_mass(rho);
    d.grad = potential_gradient(rho);
    d.value = potential_value(rho, &d.far_field_warning);
    return d;
}

double h_minus_one_distance(const DensityField& rho1, const DensityField& rho2) {
    if (!(rho1.grid == rho2.grid)) throw Error("h_minus_one_distance: densities live on different grids");
    const auto& g = rho1.grid;
    const double m1 = rho1.total_mass();
    const double m2 = rho2.total_mass();
    if (std::abs(m1 - m2) > 1e-8 * std::max(std::abs(m1), std::abs(m2)))
        throw Error("h_minus_one_distance: masses differ, the distance is undefined");

    double signed_mass = 0.0;
    double s = 0.0;
    const double dr = g.dr();
    for (std::size_t i = 0; i < g.cells(); ++i) {
        signed_mass += (rho1.values[i] - rho2.values[i]) * g.volume(i);
        const double a = g.face_area(i + 1);
        const double u = signed_mass / a;
        s += u * u * a * dr;
    }
    return std::sqrt(s);
}

}  // namespace pks
