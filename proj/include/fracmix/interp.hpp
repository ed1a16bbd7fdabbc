#pragma once

#include <span>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "fracmix/grid.hpp"

namespace fracmix {

/// Clamped cubic spline through samples on a uniform grid. The endpoint
/// slopes come from one-sided fourth-order differences, which keeps the
/// interpolant O(h^4) up to the boundary.
class UniformSpline {
public:
    UniformSpline() = default;
    UniformSpline(const UniformGrid& grid, std::span<const double> values);

    double operator()(double x) const;
    double prime(double x) const;

private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

/// Local Lagrange interpolation through the eight nearest samples of a
/// uniform grid (degree 7, shifted inwards near the ends).
class UniformLagrange {
public:
    UniformLagrange(const UniformGrid& grid, std::span<const double> values);
    double operator()(double x) const;

private:
    UniformGrid grid_;
    std::vector<double> v_;
};

/// Fourth-order finite-difference first and second derivatives on a uniform
/// grid (centered inside, one-sided near the ends).
void fd_derivatives(const UniformGrid& grid, std::span<const double> v, std::vector<double>& d1,
                    std::vector<double>& d2);

}  // namespace fracmix
