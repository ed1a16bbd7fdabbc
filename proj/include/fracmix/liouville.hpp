#pragma once

// Liouville transformation of (r v')' - e v on [a, b] to the normal form
// v'' - g(z) v on [0, 1], and the maps that move functions and eigenvalues
// between the two frames.

#include <functional>
#include <span>
#include <vector>

#include "fracmix/grid.hpp"

namespace fracmix {

using RealFn = std::function<double(double)>;

struct OperatorSpec {
    double a = 0.0;
    double b = 1.0;
    RealFn r;
    RealFn e;
    // Analytic r' and r''; when empty, fourth-order differences of r are used.
    RealFn dr;
    RealFn d2r;

    /// r = 1, e = 0 on [0, 1].
    static OperatorSpec identity();
    /// Dense samples of r and e on one uniform grid over [a, b].
    static OperatorSpec from_samples(const UniformGrid& grid, std::span<const double> r,
                                     std::span<const double> e);
};

struct LiouvilleMap {
    double K = 1.0;
    UniformGrid x_grid;            // uniform on [a, b]
    UniformGrid z_grid;            // uniform on [0, 1]
    std::vector<double> z_at_x;    // z(x_i)
    std::vector<double> x_at_z;    // x(z_j)
    std::vector<double> l_at_x;    // r(x_i)^{1/4}
    std::vector<double> l_at_z;    // r(x(z_j))^{1/4}
    std::vector<double> g;         // normal-form potential on z_grid

    double z_of_x(double x) const;
    double x_of_z(double z) const;

    // Kept for point evaluation of the maps.
    RealFn r;
};

inline constexpr double kDefaultPotentialCap = 1.0e8;

/// Throws NonPositiveR, SingularPotential (|g| above cap or not finite) and
/// NonPositivePotential (min g < 0).
LiouvilleMap build_map(const OperatorSpec& op, std::size_t n_grid,
                       double g_cap = kDefaultPotentialCap);

/// z -> l(x(z)) v(x(z)) on the z grid.
std::vector<double> push_function(const LiouvilleMap& map, const RealFn& v);
/// Same, for v sampled on the x grid (interpolated by a cubic spline).
std::vector<double> push_samples(const LiouvilleMap& map, std::span<const double> v);
/// Inverse of push: vbar sampled on the z grid -> v on the x grid.
std::vector<double> pull_function(const LiouvilleMap& map, std::span<const double> vbar);

/// mu = lambda / K^2.
double eigenvalue_pullback(const LiouvilleMap& map, double lambda);

}  // namespace fracmix
