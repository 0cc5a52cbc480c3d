#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pks {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

// Cell-centred radial mesh on [0, r_max]. Faces are indexed 0..cells, face j
// sits at r = j*dr; cell i lies between faces i and i+1.
class RadialGrid {
public:
    RadialGrid() = default;
    RadialGrid(int n_dim, double r_max, std::size_t cells);

    int n_dim() const { return n_; }
    double r_max() const { return r_max_; }
    std::size_t cells() const { return centers_.size(); }
    double dr() const { return dr_; }
    double omega_n() const { return omega_n_; }

    std::span<const double> centers() const { return centers_; }
    std::span<const double> faces() const { return faces_; }
    std::span<const double> face_areas() const { return face_areas_; }
    std::span<const double> cell_volumes() const { return volumes_; }

    double center(std::size_t i) const { return centers_[i]; }
    double face(std::size_t j) const { return faces_[j]; }
    double face_area(std::size_t j) const { return face_areas_[j]; }
    double volume(std::size_t i) const { return volumes_[i]; }

    double total_volume() const;

    bool operator==(const RadialGrid& o) const {
        return n_ == o.n_ && r_max_ == o.r_max_ && cells() == o.cells();
    }

private:
    int n_ = 3;
    double r_max_ = 0.0;
    double dr_ = 0.0;
    double omega_n_ = 0.0;
    std::vector<double> centers_;
    std::vector<double> faces_;
    std::vector<double> face_areas_;
    std::vector<double> volumes_;
};

RadialGrid make_grid(int n_dim, double r_max, std::size_t cells);

struct DensityField {
    RadialGrid grid;
    std::vector<double> values;

    DensityField() = default;
    DensityField(RadialGrid g, std::vector<double> v);
    explicit DensityField(RadialGrid g);

    double total_mass() const;
    double max() const;
};

struct PressureField {
    RadialGrid grid;
    std::vector<double> values;
    double exponent = 2.0;

    PressureField() = default;
    PressureField(RadialGrid g, std::vector<double> v, double m);
};

// P = m/(m-1) rho^(m-1)
PressureField pressure_from_density(const DensityField& rho, double m);
DensityField density_from_pressure(const PressureField& p);

inline constexpr double kInfNorm = -1.0;

// (sum |f_i|^p v_i)^(1/p); pass kInfNorm (or +inf) for the max norm.
double lp_norm(const RadialGrid& grid, std::span<const double> f, double p);

// || (rho - 1)_+ ||_2
double excess_above_one(const DensityField& rho);

}  // namespace pks
