#pragma once

// L1 discretization of the Caputo derivative of order alpha in (0, 1).

#include <cmath>
#include <vector>

namespace oracle {

inline double l1_weight(double alpha, std::size_t j) {
    return std::pow(static_cast<double>(j + 1), 1.0 - alpha) - std::pow(static_cast<double>(j), 1.0 - alpha);
}

/// Solves D^alpha V + lambda V = f, V(0) = V0 on [0, T] with n uniform steps.
/// Returns V at the n + 1 nodes.
inline std::vector<double> caputo_l1_solve(double alpha, double lambda, double V0, double f, double T,
                                           std::size_t n) {
    const double tau = T / static_cast<double>(n);
    const double c = std::pow(tau, -alpha) / std::tgamma(2.0 - alpha);
    std::vector<double> b(n + 1);
    for (std::size_t j = 0; j <= n; ++j) b[j] = l1_weight(alpha, j);
    std::vector<double> V(n + 1);
    V[0] = V0;
    for (std::size_t m = 1; m <= n; ++m) {
        double hist = 0.0;
        for (std::size_t j = 1; j < m; ++j) hist += b[j] * (V[m - j] - V[m - j - 1]);
        // c (b0 (V_m - V_{m-1}) + hist) + lambda V_m = f
        V[m] = (f - c * hist + c * b[0] * V[m - 1]) / (c * b[0] + lambda);
    }
    return V;
}

/// Discrete Caputo derivative at node m of samples V on a uniform grid with step tau.
inline double caputo_l1_apply(double alpha, const std::vector<double>& V, double tau, std::size_t m) {
    const double c = std::pow(tau, -alpha) / std::tgamma(2.0 - alpha);
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += l1_weight(alpha, j) * (V[m - j] - V[m - j - 1]);
    return c * acc;
}

}  // namespace oracle
