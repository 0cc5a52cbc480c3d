#include "pks/initial_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pks {

namespace {

constexpr std::array<double, 8> kGaussX = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                           -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                           0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussW = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

// int_a^b f(r) r^(n-1) dr
template <class F>
double shell_integral(F&& f, double a, double b, int n) {
    if (b <= a) return 0.0;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t k = 0; k < kGaussX.size(); ++k) {
        const double r = mid + half * kGaussX[k];
        s += kGaussW[k] * f(r) * std::pow(r, n - 1);
    }
    return s * half;
}

}  // namespace

DensityField bump_density(const RadialGrid& grid, double amplitude, double radius) {
    if (!(amplitude >= 0.0)) throw Error("bump amplitude must be non-negative");
    if (!(radius > 0.0)) throw Error("bump radius must be positive");
    std::vector<double> v(grid.cells());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = 1.0 - std::pow(grid.center(i) / radius, 2);
        v[i] = x > 0.0 ? amplitude * x * x : 0.0;
    }
    return {grid, std::move(v)};
}

DensityField patch_density(const RadialGrid& grid, double radius) {
    if (!(radius > 0.0)) throw Error("patch radius must be positive");
    const int n = grid.n_dim();
    std::vector<double> v(grid.cells());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double lo = grid.face(i);
        const double hi = grid.face(i + 1);
        if (hi <= radius) {
            v[i] = 1.0;
        } else if (lo < radius) {
            v[i] = (std::pow(radius, n) - std::pow(lo, n)) / (std::pow(hi, n) - std::pow(lo, n));
        }
    }
    return {grid, std::move(v)};
}

double barenblatt(double r, double t, double m, int n, double c) {
    const double a = n / (n * (m - 1.0) + 2.0);
    const double k = a * (m - 1.0) / (2.0 * m * n);
    const double x = c - k * r * r * std::pow(t, -2.0 * a / n);
    return x > 0.0 ? std::pow(t, -a) * std::pow(x, 1.0 / (m - 1.0)) : 0.0;
}

double barenblatt_radius(double t, double m, int n, double c) {
    const double a = n / (n * (m - 1.0) + 2.0);
    const double k = a * (m - 1.0) / (2.0 * m * n);
    return std::sqrt(c / k) * std::pow(t, a / n);
}

DensityField barenblatt_density(const RadialGrid& grid, double t, double m, double c) {
    const int n = grid.n_dim();
    const double front = barenblatt_radius(t, m, n, c);
    auto f = [&](double r) { return barenblatt(r, t, m, n, c); };
    std::vector<double> v(grid.cells());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double lo = grid.face(i);
        const double hi = grid.face(i + 1);
        if (lo >= front) continue;
        const double top = std::min(hi, front);
        const double shell = (std::pow(hi, n) - std::pow(lo, n)) / n;
        v[i] = shell_integral(f, lo, top, n) / shell;
    }
    return {grid, std::move(v)};
}

}  // namespace pks
