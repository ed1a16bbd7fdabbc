#include "fracmix/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracmix/errors.hpp"
#include "fracmix/mlf.hpp"
#include "fracmix/parallel.hpp"

namespace fracmix {

namespace {

double ml(double a, double b, double z) { return mlf_eval({a, b}, z); }

}  // namespace

void ProblemSpec::validate() const {
    std::ostringstream os;
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        os << "alpha must lie in (0, 1], got " << alpha;
        fail(ErrorCode::InvalidOrder, os.str());
    }
    if (!(beta == 2.0 || (beta > 1.0 && beta < 2.0))) {
        os << "beta must be 2 or lie in (1, 2), got " << beta;
        fail(ErrorCode::InvalidOrder, os.str());
    }
    if (!(p > 0.0 && q > 0.0 && std::isfinite(p) && std::isfinite(q))) {
        os << "time extents must be positive and finite, got p = " << p << ", q = " << q;
        fail(ErrorCode::InvalidArgument, os.str());
    }
    for (const auto* v : {&phi, &psi}) {
        if (v->empty()) continue;
        const double scale = std::max(1.0, max_abs(*v));
        require(std::abs(v->front()) <= 1e-8 * scale && std::abs(v->back()) <= 1e-8 * scale,
                ErrorCode::InvalidArgument, "measurements must vanish at x = 0 and x = 1");
    }
}

double mode_parabolic(double alpha, double lambda, double V0, double f, double t) {
    require(t >= 0.0, ErrorCode::InvalidArgument, "parabolic branch needs t >= 0");
    if (t == 0.0) return V0;
    const double ta = std::pow(t, alpha);
    const double z = -lambda * ta;
    return V0 * ml(alpha, 1.0, z) + f * ta * ml(alpha, alpha + 1.0, z);
}

double mode_parabolic_caputo(double alpha, double lambda, double V0, double f, double t) {
    require(t >= 0.0, ErrorCode::InvalidArgument, "parabolic branch needs t >= 0");
    return (f - lambda * V0) * ml(alpha, 1.0, -lambda * std::pow(t, alpha));
}

double mode_wave(double lambda, double A, double B, double f, double t) {
    const double s = std::sqrt(lambda);
    return A * std::sin(s * t) + B * std::cos(s * t) + f / lambda;
}

double mode_wave_dt(double lambda, double A, double B, double t) {
    const double s = std::sqrt(lambda);
    return s * (A * std::cos(s * t) - B * std::sin(s * t));
}

double mode_fractional_wave(double beta, double lambda, double W0, double W0prime, double f, double t) {
    require(t <= 0.0, ErrorCode::InvalidArgument, "hyperbolic branch needs t <= 0");
    if (t == 0.0) return W0;
    const double tau = -t;
    const double tb = std::pow(tau, beta);
    const double z = -lambda * tb;
    return W0 * ml(beta, 1.0, z) + t * W0prime * ml(beta, 2.0, z) + f * tb * ml(beta, beta + 1.0, z);
}

double mode_fractional_wave_dt(double beta, double lambda, double W0, double W0prime, double f,
                               double t) {
    require(t <= 0.0, ErrorCode::InvalidArgument, "hyperbolic branch needs t <= 0");
    if (t == 0.0) return W0prime;
    const double tau = -t;
    const double z = -lambda * std::pow(tau, beta);
    return W0prime * ml(beta, 1.0, z) + (lambda * W0 - f) * std::pow(tau, beta - 1.0) * ml(beta, beta, z);
}

ModeSolution make_mode(int k, double beta, double lambda, double f, double V0) {
    require(lambda > 0.0, ErrorCode::InvalidArgument, "eigenvalue must be positive");
    ModeSolution m;
    m.k = k;
    m.lambda = lambda;
    m.f = f;
    m.V0 = V0;
    if (beta == 2.0) {
        m.B = V0 - f / lambda;
        m.A = (f - lambda * V0) / std::sqrt(lambda);
    } else {
        m.W0 = V0;
        m.W0prime = f - lambda * V0;
    }
    return m;
}

double mode_value(const ModeSolution& m, double alpha, double beta, double t) {
    if (t >= 0.0) return mode_parabolic(alpha, m.lambda, m.V0, m.f, t);
    if (beta == 2.0) return mode_wave(m.lambda, m.A, m.B, m.f, t);
    return mode_fractional_wave(beta, m.lambda, m.W0, m.W0prime, m.f, t);
}

std::vector<double> make_time_grid(double p, double q, std::size_t n_neg, std::size_t n_pos) {
    require(n_neg >= 1 && n_pos >= 1, ErrorCode::InvalidArgument, "time grid needs points on both sides");
    std::vector<double> t;
    t.reserve(n_neg + n_pos + 1);
    for (std::size_t i = 0; i < n_neg; ++i) {
        t.push_back(-p + p * static_cast<double>(i) / static_cast<double>(n_neg));
    }
    t.push_back(0.0);
    for (std::size_t i = 1; i <= n_pos; ++i) {
        t.push_back(i == n_pos ? q : q * static_cast<double>(i) / static_cast<double>(n_pos));
    }
    return t;
}

std::vector<double> field_at(const EigenSystem& sys, std::span<const ModeSolution> modes, double alpha,
                             double beta, double t) {
    require(modes.size() <= sys.n_modes(), ErrorCode::GridMismatch, "more modes than eigenpairs");
    std::vector<double> c(modes.size());
    for (std::size_t k = 0; k < modes.size(); ++k) c[k] = mode_value(modes[k], alpha, beta, t);
    return synthesize(sys, c);
}

SolutionField assemble_field(const EigenSystem& sys, std::span<const ModeSolution> modes, double alpha,
                             double beta, std::span<const double> grid_t) {
    require(modes.size() <= sys.n_modes(), ErrorCode::GridMismatch, "more modes than eigenpairs");
    SolutionField field;
    field.grid_x = sys.grid.points();
    field.grid_t.assign(grid_t.begin(), grid_t.end());
    field.u.resize(grid_t.size());
    parallel_for(grid_t.size(), [&](std::size_t i) {
        field.u[i] = field_at(sys, modes, alpha, beta, grid_t[i]);
    });
    return field;
}

double gluing_residual(std::span<const ModeSolution> modes, double alpha, double beta, double p,
                       double q, double t_small) {
    require(t_small > 0.0 && t_small <= std::min(p, q) / 10.0, ErrorCode::InvalidArgument,
            "t_small must lie in (0, min(p, q) / 10]");
    double sum = 0.0;
    for (const auto& m : modes) {
        const double lhs = mode_parabolic_caputo(alpha, m.lambda, m.V0, m.f, t_small);
        const double rhs = beta == 2.0
                               ? mode_wave_dt(m.lambda, m.A, m.B, -t_small)
                               : mode_fractional_wave_dt(beta, m.lambda, m.W0, m.W0prime, m.f, -t_small);
        sum += (lhs - rhs) * (lhs - rhs);
    }
    return std::sqrt(sum);
}

double truncation_tail_estimate(std::span<const double> coeffs, std::span<const double> lambda) {
    const std::size_t K = std::min(coeffs.size(), lambda.size());
    if (K == 0) return 0.0;
    const std::size_t fit = std::min<std::size_t>(4, K);
    double C = 0.0;
    for (std::size_t k = K - fit; k < K; ++k) C = std::max(C, std::abs(coeffs[k]) * lambda[k] * lambda[k]);
    // sum_{k > K} (k pi)^{-4} ~ 1 / (3 pi^4 K^3).
    constexpr double pi4 = std::numbers::pi * std::numbers::pi * std::numbers::pi * std::numbers::pi;
    const double kk = static_cast<double>(K) + 0.5;
    return std::numbers::sqrt2 * C / (3.0 * pi4 * kk * kk * kk);
}

CsvTable field_to_csv(const SolutionField& field) {
    CsvTable table;
    table.header = {"t", "x", "u"};
    table.columns.assign(3, {});
    for (std::size_t i = 0; i < field.grid_t.size(); ++i) {
        for (std::size_t j = 0; j < field.grid_x.size(); ++j) {
            table.columns[0].push_back(field.grid_t[i]);
            table.columns[1].push_back(field.grid_x[j]);
            table.columns[2].push_back(field.u[i][j]);
        }
    }
    return table;
}

Json field_to_json(const SolutionField& field) {
    Json doc;
    doc["grid_x"] = field.grid_x;
    doc["grid_t"] = field.grid_t;
    std::vector<double> flat;
    flat.reserve(field.grid_t.size() * field.grid_x.size());
    for (const auto& row : field.u) flat.insert(flat.end(), row.begin(), row.end());
    doc["layout"] = "row-major, t outer, x inner";
    doc["u"] = flat;
    return doc;
}

}  // namespace fracmix
