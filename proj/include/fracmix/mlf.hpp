#pragma once

// Two-parameter Mittag-Leffler function E_{a,b}(z) on the real axis.
//
// The supported region is z <= 1 with 0 < alpha < 2. Evaluation switches
// between three routes:
//   |z| <= kSeriesRadius      power series with compensated summation
//   |z| >= kAsymptoticRadius  algebraic expansion (plus pole residues when
//                             alpha > 1), used only when its remainder is
//                             provably below double precision
//   otherwise                 Laplace-transform inversion along an optimal
//                             parabolic contour
//
// All functions are pure and safe to call concurrently.

#include <complex>

namespace fracmix {

struct MlfParams {
    double alpha = 1.0;
    double beta = 1.0;

    /// Throws InvalidOrder unless 0 < alpha < 2 and beta is finite.
    void validate() const;
};

inline constexpr double kSeriesRadius = 1.0;
inline constexpr double kAsymptoticRadius = 50.0;

/// E_{alpha,beta}(z). Throws UnsupportedRegion for z > 1.
double mlf_eval(MlfParams params, double z);

/// Truncated algebraic expansion -sum_{k=1..terms} z^{-k} / Gamma(beta - alpha k).
/// Requires z <= -kAsymptoticRadius (RegionTooSmall otherwise).
double mlf_asymptotic(MlfParams params, double z, int terms);

/// E_{a,mu}(z) - 1/Gamma(mu) - z E_{a,mu+a}(z), with params.beta playing mu.
double mlf_recurrence_residual(MlfParams params, double z);

/// 1/Gamma(x); exactly zero at the poles x = 0, -1, -2, ...
double rgamma(double x);

/// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

namespace detail {

// Individual evaluation routes, exposed for cross-checking in tests.
// They skip the public parameter checks: the contour route also accepts
// alpha = 2 and any real z.
double mlf_series(double alpha, double beta, double z);
double mlf_contour(double alpha, double beta, double z);

/// Sum of the residues of s^{alpha-beta} e^s / (s^alpha - z) at the poles
/// on the principal sheet (non-empty only for alpha > 1 and z < 0).
double mlf_pole_contribution(double alpha, double beta, double z);

/// Adaptive expansion stopped at the smallest term; returns false when it
/// cannot certify a relative remainder below ~1e-16.
bool mlf_try_asymptotic(double alpha, double beta, double z, double& out);

}  // namespace detail

}  // namespace fracmix
