#pragma once

// Uniform grids and composite quadrature shared by every module.

#include <cstddef>
#include <span>
#include <vector>

namespace fracmix {

struct UniformGrid {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 0;  // number of points, endpoints included

    UniformGrid() = default;
    UniformGrid(double lo, double hi, std::size_t points);

    double step() const { return (b - a) / static_cast<double>(n - 1); }
    double operator[](std::size_t i) const;
    std::vector<double> points() const;
    bool same_as(const UniformGrid& other) const;
};

/// Composite Simpson weights; an even point count closes with the 3/8 rule
/// on the last three intervals.
std::vector<double> simpson_weights(const UniformGrid& grid);

double integrate(std::span<const double> weights, std::span<const double> v);
double inner(std::span<const double> weights, std::span<const double> u, std::span<const double> v);
double l2_norm(std::span<const double> weights, std::span<const double> v);
double max_abs(std::span<const double> v);

}  // namespace fracmix
