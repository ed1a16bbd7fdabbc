#pragma once

// Per-mode solutions of the mixed problem. For t > 0 every mode solves the
// Caputo equation D^alpha V + lambda V = f; for t < 0 it solves either the
// wave equation (beta = 2) or its Caputo analogue of order beta in (1, 2).
// The two branches are glued at t = 0 by continuity of u and by
// lim_{t->0+} D^alpha V = W'(0-).

#include <filesystem>
#include <span>
#include <vector>

#include "fracmix/io.hpp"
#include "fracmix/spectral.hpp"

namespace fracmix {

struct ProblemSpec {
    double alpha = 0.5;
    double beta = 2.0;
    double p = 1.0;
    double q = 1.0;
    std::vector<double> phi;  // u(x, q)
    std::vector<double> psi;  // u(x, -p)

    bool is_wave() const { return beta == 2.0; }
    /// Orders, extents and (when non-empty) boundary compatibility of phi, psi.
    void validate() const;
};

struct ModeSolution {
    int k = 0;  // 1-based
    double lambda = 0.0;
    double f = 0.0;
    double V0 = 0.0;
    double A = 0.0;  // wave amplitudes (beta = 2)
    double B = 0.0;
    double W0 = 0.0;  // fractional branch data (1 < beta < 2)
    double W0prime = 0.0;
    double delta = 0.0;
};

double mode_parabolic(double alpha, double lambda, double V0, double f, double t);
/// D^alpha V(t) = (f - lambda V0) E_{alpha,1}(-lambda t^alpha).
double mode_parabolic_caputo(double alpha, double lambda, double V0, double f, double t);

double mode_wave(double lambda, double A, double B, double f, double t);
double mode_wave_dt(double lambda, double A, double B, double t);

double mode_fractional_wave(double beta, double lambda, double W0, double W0prime, double f, double t);
double mode_fractional_wave_dt(double beta, double lambda, double W0, double W0prime, double f,
                               double t);

/// Gluing-consistent mode from (lambda, f, V0), filling the branch selected by beta.
ModeSolution make_mode(int k, double beta, double lambda, double f, double V0);

/// u_k(t) on the branch selected by the sign of t.
double mode_value(const ModeSolution& m, double alpha, double beta, double t);

struct SolutionField {
    std::vector<double> grid_x;
    std::vector<double> grid_t;
    std::vector<std::vector<double>> u;  // u[i_t][i_x]
};

/// Uniform times on [-p, 0] and [0, q] with t = 0 included once.
std::vector<double> make_time_grid(double p, double q, std::size_t n_neg, std::size_t n_pos);

/// sum_k u_k(t) w_k(x) at a single time.
std::vector<double> field_at(const EigenSystem& sys, std::span<const ModeSolution> modes, double alpha,
                             double beta, double t);

SolutionField assemble_field(const EigenSystem& sys, std::span<const ModeSolution> modes, double alpha,
                             double beta, std::span<const double> grid_t);

/// || D^alpha u(., t) - u_t(., -t) ||_{L2}, evaluated mode-wise (Parseval).
double gluing_residual(std::span<const ModeSolution> modes, double alpha, double beta, double p,
                       double q, double t_small);

/// Tail estimate sum_{k > K} |c_k| ||w_k||_inf under the decay model c_k ~ C lambda_k^{-2},
/// with C fitted on the last few resolved modes and ||w_k||_inf ~ sqrt(2).
double truncation_tail_estimate(std::span<const double> coeffs, std::span<const double> lambda);

CsvTable field_to_csv(const SolutionField& field);
Json field_to_json(const SolutionField& field);

}  // namespace fracmix
