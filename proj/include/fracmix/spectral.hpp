#pragma once

// Dirichlet eigenproblem -w'' + g w = lambda w on [0, 1].

#include <filesystem>
#include <span>
#include <vector>

#include "fracmix/grid.hpp"
#include "fracmix/io.hpp"
#include "fracmix/liouville.hpp"

namespace fracmix {

struct EigenSystem {
    UniformGrid grid;
    std::vector<double> weights;               // Simpson weights on grid
    std::vector<double> potential;             // g on grid
    std::vector<double> lambda;                // increasing
    std::vector<std::vector<double>> modes;    // L2-normalized, w'(0) > 0

    std::size_t n_modes() const { return lambda.size(); }
};

inline constexpr std::size_t kDefaultGridPoints = 2049;
inline constexpr std::size_t kDefaultModes = 64;

struct SpectralOptions {
    bool richardson = true;  // combine meshes h and h/2 to cancel the O(h^2) bias
};

/// Finite differences on n_grid points. The finer mesh used by the
/// extrapolation samples g between grid points by cubic interpolation.
/// Throws ResolutionTooLow if 8 n_modes > n_grid, NonPositivePotential if min g < 0.
EigenSystem solve_eigensystem(std::span<const double> g, std::size_t n_modes, std::size_t n_grid,
                              SpectralOptions opts = {});
/// Same with g given pointwise (no interpolation on the fine mesh).
EigenSystem solve_eigensystem(const RealFn& g, std::size_t n_modes, std::size_t n_grid,
                              SpectralOptions opts = {});

/// Exact eigenpairs for a constant potential: k^2 pi^2 + c and sqrt(2) sin(k pi x).
EigenSystem constant_potential_system(double c, std::size_t n_modes, std::size_t n_grid);

/// c_k = (v, w_k) by Simpson quadrature, for the first n_modes modes (0 = all).
std::vector<double> project(const EigenSystem& sys, std::span<const double> v, std::size_t n_modes = 0);
std::vector<double> synthesize(const EigenSystem& sys, std::span<const double> c);

Json eigensystem_to_json(const EigenSystem& sys);
EigenSystem eigensystem_from_json(const Json& doc);

}  // namespace fracmix
