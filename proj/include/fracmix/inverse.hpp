#pragma once

// Recovery of the source f and the field u from u(., q) = phi and
// u(., -p) = psi, mode by mode, together with the conditioning diagnostics
// built on the per-mode determinants.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fracmix/forward.hpp"
#include "fracmix/io.hpp"
#include "fracmix/spectral.hpp"

namespace fracmix {

inline constexpr double kDefaultDeltaFloor = 1.0e-8;
inline constexpr double kDefaultDeltaWarn = 1.0e-4;
inline constexpr double kDefaultTMin = 1.0e-4;

/// E_{a,1}(-lambda q^a) - sqrt(lambda) sin(sqrt(lambda) p) - cos(sqrt(lambda) p).
double delta_problem1(double alpha, double lambda, double p, double q);
/// Same determinant in phase form E - sqrt(lambda + 1) sin(sqrt(lambda) p + gamma).
double delta_problem1_phase(double alpha, double lambda, double p, double q);
/// E_{b,1}(-lambda p^b) + lambda p E_{b,2}(-lambda p^b).
double fractional_bracket(double beta, double lambda, double p);
/// E_{a,1}(-lambda q^a) - fractional_bracket(beta, lambda, p).
double delta_problem2(double alpha, double beta, double lambda, double p, double q);
/// Dispatches on beta (2 selects the wave determinant).
double mode_delta(double alpha, double beta, double lambda, double p, double q);

struct ReconstructOptions {
    double delta_floor = kDefaultDeltaFloor;
    double delta_warn = kDefaultDeltaWarn;
    double t_min = kDefaultTMin;
    std::size_t n_modes = 0;    // 0 = every mode of the eigensystem
    std::size_t n_t_neg = 32;   // time grid for the assembled field
    std::size_t n_t_pos = 32;
    bool assemble = true;       // build u on the time grid
};

struct DeltaDiagnostics {
    std::vector<double> lambda;
    std::vector<double> delta;
    std::vector<int> flagged;   // |delta| < floor, 1-based
    std::vector<int> warned;    // floor <= |delta| < warn
    double min_abs_delta = 0.0;
    int argmin = 0;
};

DeltaDiagnostics diagnose(const EigenSystem& sys, double alpha, double beta, double p, double q,
                          std::size_t n_modes, double delta_floor, double delta_warn);

struct ReconstructionReport {
    std::vector<double> phi_coeffs;
    std::vector<double> psi_coeffs;
    std::vector<double> f_coeffs;
    std::vector<double> f;       // samples on the eigen grid
    std::vector<ModeSolution> modes;
    SolutionField u_field;
    DeltaDiagnostics deltas;
    std::vector<int> zero_over_zero;  // flagged modes resolved by the 0/0 rule
    double residual_q = 0.0;     // ||u(., q) - phi||
    double residual_p = 0.0;     // ||u(., -p) - psi||
    double truncation_q = 0.0;   // ||phi - P_K phi||
    double truncation_p = 0.0;
    double gluing = 0.0;         // gluing residual at t_min
    double tail_estimate = 0.0;
};

/// Throws IllPosedModeError listing the modes whose |delta| < delta_floor,
/// unless the data difference phi_k - psi_k vanishes there too (0/0 mode:
/// the quotient is taken as 0 and the mode is logged).
ReconstructionReport reconstruct(const EigenSystem& sys, const ProblemSpec& spec,
                                 const ReconstructOptions& opts = {});

/// f coefficients only, from given phi/psi coefficients (no field assembly).
std::vector<double> reconstruct_coeffs(std::span<const double> lambda, std::span<const double> phi,
                                       std::span<const double> psi, double alpha, double beta, double p,
                                       double q, double delta_floor = kDefaultDeltaFloor);

Json report_to_json(const ReconstructionReport& r, const ProblemSpec& spec, const ReconstructOptions& opts);

// ---- ill-posedness catalog --------------------------------------------------

struct CatalogEntry {
    int k = 0;
    int n = 0;
    std::string branch;  // "arcsin" or "pi-minus"
    double p = 0.0;
    double delta = 0.0;  // determinant at the refined p
};

struct IllposednessCatalog {
    std::vector<CatalogEntry> entries;  // sorted by p
    std::vector<double> gamma;          // arcsin(1 / sqrt(lambda_k + 1)), k = 1..k_max
};

/// Roots p of the wave determinant for k <= k_max, n = 1..n_max, both branches,
/// each refined by one Newton step on the phase form and kept only if
/// |delta| <= 1e-8.
IllposednessCatalog illposed_p_catalog(const EigenSystem& sys, double alpha, double q, int k_max,
                                       int n_max);
CsvTable catalog_to_csv(const IllposednessCatalog& cat);

struct NullSolution {
    ModeSolution mode;
    SolutionField field;
    std::vector<double> f;   // f_l w_l on the grid
    double delta = 0.0;
    double trace_q = 0.0;    // ||u(., q)||
    double trace_p = 0.0;    // ||u(., -p)||
    double norm_u0 = 0.0;    // ||u(., 0)||
    double norm_f = 0.0;
};

/// Nontrivial solution with phi = psi = 0 for mode k at a root p of its
/// determinant. Throws NotIllPosed if |delta_k(p)| > 1e-6.
NullSolution null_solution(const EigenSystem& sys, double alpha, double q, int k, double p,
                           std::size_t n_t_neg = 32, std::size_t n_t_pos = 32);

// ---- probes -----------------------------------------------------------------

struct RationalProbe {
    int m = 1, n = 1;
    std::vector<double> abs_delta;  // k = 1..k_max
    double min_abs_delta = 0.0;
    int argmin = 0;
    double delta_hat = 0.0;  // min over the upper half of the k range
    int burn_in = 1;         // from here on |delta_k| >= delta_hat / 2
    bool holds = false;
};

/// Wave determinant at p = m / n over k = 1..k_max.
RationalProbe rational_p_probe(const EigenSystem& sys, double alpha, double q, int m, int n, int k_max);

struct LargeQProbe {
    double p = 1.0;
    std::vector<double> q_ladder;
    std::vector<double> min_abs_delta;   // per q
    std::vector<double> first_mode_decay;// E_{a,1}(-lambda_1 q^a) per q
    std::vector<double> bracket;         // per k
    double c_hat = 0.0;                  // min_k |bracket_k|, independent of q
    double bracket_limit = 0.0;          // 1 / (p^{b-1} Gamma(2-b))
    double bracket_last_rel = 0.0;       // |bracket_K / limit - 1|
    double q0 = 0.0;                     // first ladder q with decay < c_hat / 2
    bool holds = false;                  // min |delta| >= c_hat / 2 for every q >= q0
};

LargeQProbe large_q_probe(const EigenSystem& sys, double alpha, double beta, double p,
                          std::span<const double> q_ladder, std::size_t n_modes = 0);

struct StabilityProbe {
    double noise_level = 0.0;
    std::vector<double> ratios;
    double min_ratio = 0.0, max_ratio = 0.0, mean_ratio = 0.0;
    double lipschitz_bound = 0.0;  // certified: every ratio is at most this
};

/// Lipschitz ratios ||df|| / (||dphi||_H + ||dpsi||_H) under noise
/// d c_k = sigma xi_k / lambda_k^2 on the resolved modes, with
/// ||c||_H^2 = sum lambda_k^2 c_k^2. Deterministic for a given seed.
StabilityProbe stability_probe(const EigenSystem& sys, const ProblemSpec& spec, double noise_level,
                               int n_trials, std::uint64_t seed, std::size_t n_modes = 0,
                               double delta_floor = kDefaultDeltaFloor);

Json probe_to_json(const RationalProbe& r);
Json probe_to_json(const LargeQProbe& r);
Json probe_to_json(const StabilityProbe& r);

}  // namespace fracmix
