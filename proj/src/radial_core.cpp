#include "pks/radial_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace pks {

double unit_ball_volume(int n) {
    const double half = 0.5 * n;
    return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

RadialGrid::RadialGrid(int n_dim, double r_max, std::size_t cells)
    : n_(n_dim), r_max_(r_max) {
    if (n_dim < 3)
        throw Error("n_dim must be >= 3 (got " + std::to_string(n_dim) + ")");
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw Error("r_max must be positive and finite");
    if (cells == 0) throw Error("cells must be positive");

    dr_ = r_max / static_cast<double>(cells);
    omega_n_ = unit_ball_volume(n_dim);

    centers_.resize(cells);
    faces_.resize(cells + 1);
    face_areas_.resize(cells + 1);
    volumes_.resize(cells);

    const double sphere = n_dim * omega_n_;
    for (std::size_t j = 0; j <= cells; ++j) {
        faces_[j] = static_cast<double>(j) * dr_;
        face_areas_[j] = j == 0 ? 0.0 : sphere * std::pow(faces_[j], n_dim - 1);
    }
    faces_[cells] = r_max;
    for (std::size_t i = 0; i < cells; ++i) {
        centers_[i] = (static_cast<double>(i) + 0.5) * dr_;
        volumes_[i] = omega_n_ * (std::pow(faces_[i + 1], n_dim) - std::pow(faces_[i], n_dim));
    }
}

double RadialGrid::total_volume() const {
    double s = 0.0;
    for (double v : volumes_) s += v;
    return s;
}

RadialGrid make_grid(int n_dim, double r_max, std::size_t cells) {
    return RadialGrid(n_dim, r_max, cells);
}

DensityField::DensityField(RadialGrid g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.cells()) throw Error("density size does not match grid");
    for (double x : values)
        if (!(x >= 0.0) || !std::isfinite(x)) throw Error("density must be finite and non-negative");
}

DensityField::DensityField(RadialGrid g) : grid(std::move(g)), values(grid.cells(), 0.0) {}

double DensityField::total_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * grid.volume(i);
    return s;
}

double DensityField::max() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

PressureField::PressureField(RadialGrid g, std::vector<double> v, double m)
    : grid(std::move(g)), values(std::move(v)), exponent(m) {
    if (values.size() != grid.cells()) throw Error("pressure size does not match grid");
    for (double x : values)
        if (!(x >= 0.0) || !std::isfinite(x)) throw Error("pressure must be finite and non-negative");
}

PressureField pressure_from_density(const DensityField& rho, double m) {
    if (!(m > 1.0)) throw Error("pressure law requires m > 1");
    const double c = m / (m - 1.0);
    std::vector<double> p(rho.values.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = rho.values[i];
        p[i] = r > 0.0 ? c * std::pow(r, m - 1.0) : 0.0;
    }
    return {rho.grid, std::move(p), m};
}

DensityField density_from_pressure(const PressureField& p) {
    const double m = p.exponent;
    const double c = (m - 1.0) / m;
    std::vector<double> rho(p.values.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double x = p.values[i];
        rho[i] = x > 0.0 ? std::pow(c * x, 1.0 / (m - 1.0)) : 0.0;
    }
    return {p.grid, std::move(rho)};
}

double lp_norm(const RadialGrid& grid, std::span<const double> f, double p) {
    if (f.size() != grid.cells()) throw Error("field size does not match grid");
    if (p == kInfNorm || std::isinf(p)) {
        double mx = 0.0;
        for (double x : f) mx = std::max(mx, std::abs(x));
        return mx;
    }
    if (!(p >= 1.0)) throw Error("lp_norm requires p >= 1");
    double s = 0.0;
    if (p == 1.0) {
        for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i]) * grid.volume(i);
        return s;
    }
    if (p == 2.0) {
        for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * f[i] * grid.volume(i);
        return std::sqrt(s);
    }
    for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p) * grid.volume(i);
    return std::pow(s, 1.0 / p);
}

double excess_above_one(const DensityField& rho) {
    std::vector<double> e(rho.values.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::max(rho.values[i] - 1.0, 0.0);
    return lp_norm(rho.grid, e, 2.0);
}

}  // namespace pks
