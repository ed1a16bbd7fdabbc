#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "caputo_l1.hpp"
#include "fracmix/errors.hpp"
#include "fracmix/forward.hpp"
#include "fracmix/mlf.hpp"

using namespace fracmix;

namespace {

double rel_err(double got, double ref) { return std::abs(got - ref) / std::abs(ref); }

const EigenSystem& zero_system() {
    static const EigenSystem sys = constant_potential_system(0.0, 16, 513);
    return sys;
}

}  // namespace

TEST_CASE("parabolic branch closed forms") {
    for (double a : {0.3, 0.6, 1.0}) {
        for (double t : {0.0, 0.01, 0.5, 3.0, 40.0}) {
            CHECK(std::abs(mode_parabolic(a, 7.0, 2.0 / 7.0, 2.0, t) - 2.0 / 7.0) <= 1e-10);
        }
    }
    for (double t : {0.1, 0.5, 2.0}) CHECK(rel_err(mode_parabolic(1.0, 3.0, 1.5, 0.0, t), 1.5 * std::exp(-3.0 * t)) <= 1e-13);
    CHECK(mode_parabolic(0.5, 10.0, 1.25, 2.0, 0.0) == 1.25);
    CHECK_THROWS_AS(mode_parabolic(0.5, 1.0, 1.0, 1.0, -0.1), Error);
}

TEST_CASE("parabolic branch against the L1 time stepper") {
    const double a = 0.5, lam = 10.0, V0 = 1.0, f = 2.0, T = 0.7;
    const double exact = mode_parabolic(a, lam, V0, f, T);
    double err_prev = INFINITY;
    for (std::size_t n : {700, 1400, 2800, 5600}) {
        const auto V = oracle::caputo_l1_solve(a, lam, V0, f, T, n);
        const double err = rel_err(V.back(), exact);
        CHECK(err < err_prev);
        err_prev = err;
    }
    CHECK(err_prev <= 1e-4);
}

TEST_CASE("Caputo residual of the closed form converges") {
    const double a = 0.5, lam = 10.0, V0 = 1.0, f = 2.0, T = 0.7;
    double res[3];
    int j = 0;
    for (std::size_t n : {1000, 2000, 4000}) {
        const double tau = T / static_cast<double>(n);
        std::vector<double> V(n + 1);
        for (std::size_t i = 0; i <= n; ++i) V[i] = mode_parabolic(a, lam, V0, f, tau * static_cast<double>(i));
        const double d = oracle::caputo_l1_apply(a, V, tau, n);
        res[j] = std::abs(d + lam * V[n] - f);
        // the closed-form Caputo derivative agrees with the discrete one too
        CHECK(std::abs(d - mode_parabolic_caputo(a, lam, V0, f, T)) <= 10.0 * res[j] + 1e-12);
        ++j;
    }
    const double order = std::log2(res[1] / res[2]);
    MESSAGE("L1 residuals " << res[0] << " " << res[1] << " " << res[2] << ", order " << order);
    CHECK(res[2] < res[1]);
    CHECK(res[1] < res[0]);
    CHECK(order >= 1.0);
}

TEST_CASE("wave branch") {
    const double lam = M_PI * M_PI;
    CHECK(mode_wave(lam, 0.0, 0.0, 3.0, -0.4) == doctest::Approx(3.0 / lam));
    CHECK(mode_wave(lam, 0.0, 1.0, 0.0, -M_PI / std::sqrt(lam)) == doctest::Approx(-1.0).epsilon(1e-15));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ut(-2.0, -0.05);
    const double A = 0.7, B = -1.3, f = 2.5, h = 2e-3;
    for (int i = 0; i < 100; ++i) {
        const double t = ut(rng);
        auto W = [&](double s) { return mode_wave(lam, A, B, f, s); };
        const double d2 = (-W(t - 2 * h) + 16 * W(t - h) - 30 * W(t) + 16 * W(t + h) - W(t + 2 * h)) / (12 * h * h);
        CHECK(std::abs(d2 + lam * W(t) - f) <= 1e-8);
        const double d1 = (W(t - 2 * h) - 8 * W(t - h) + 8 * W(t + h) - W(t + 2 * h)) / (12 * h);
        CHECK(std::abs(d1 - mode_wave_dt(lam, A, B, t)) <= 1e-8);
    }
}

TEST_CASE("fractional wave branch") {
    const double lam = 12.0, W0 = 0.8, W1 = -1.1, f = 3.0;
    CHECK(mode_fractional_wave(1.5, lam, W0, W1, f, 0.0) == W0);
    for (double t : {-0.01, -0.5, -3.0}) {
        CHECK(std::abs(mode_fractional_wave(1.5, lam, f / lam, 0.0, f, t) - f / lam) <= 1e-10);
    }
    // beta -> 2 collapses to the wave formula with A = W'(0) / sqrt(lam).
    const double A = W1 / std::sqrt(lam), B = W0 - f / lam;
    for (double t : {-0.1, -0.4, -1.0, -2.0}) {
        const double ref = mode_wave(lam, A, B, f, t);
        CHECK(std::abs(mode_fractional_wave(2.0 - 1e-6, lam, W0, W1, f, t) - ref) <= 1e-4 * std::max(1.0, std::abs(ref)));
        CHECK(std::abs(mode_fractional_wave_dt(2.0 - 1e-6, lam, W0, W1, f, t) - mode_wave_dt(lam, A, B, t)) <= 1e-4 * std::sqrt(lam));
    }
    // derivative closed form against differences
    for (double beta : {1.2, 1.5, 1.8}) {
        for (double t : {-0.2, -0.7, -1.5}) {
            const double h = 1e-4;
            auto W = [&](double s) { return mode_fractional_wave(beta, lam, W0, W1, f, s); };
            const double fd = (W(t - 2 * h) - 8 * W(t - h) + 8 * W(t + h) - W(t + 2 * h)) / (12 * h);
            CHECK(std::abs(fd - mode_fractional_wave_dt(beta, lam, W0, W1, f, t)) <= 1e-8);
        }
    }
    CHECK_THROWS_AS(mode_fractional_wave(1.5, lam, W0, W1, f, 0.1), Error);
}

TEST_CASE("gluing system of make_mode") {
    const double lam = 20.0, f = 4.0, V0 = 0.3;
    const auto w = make_mode(2, 2.0, lam, f, V0);
    CHECK(w.B == doctest::Approx(V0 - f / lam));
    CHECK(std::sqrt(lam) * w.A == doctest::Approx(f - lam * V0));
    const auto fr = make_mode(2, 1.5, lam, f, V0);
    CHECK(fr.W0 == V0);
    CHECK(fr.W0prime == doctest::Approx(f - lam * V0));
    for (double alpha : {0.4, 1.0}) {
        // continuity and derivative gluing at t = 0
        CHECK(mode_value(w, alpha, 2.0, 0.0) == V0);
        CHECK(mode_value(w, alpha, 2.0, -1e-14) == doctest::Approx(V0));
        CHECK(mode_value(fr, alpha, 1.5, -1e-14) == doctest::Approx(V0));
        const double lim = mode_parabolic_caputo(alpha, lam, V0, f, 1e-30);
        CHECK(lim == doctest::Approx(f - lam * V0).epsilon(1e-5));
        CHECK(mode_wave_dt(lam, w.A, w.B, 0.0) == doctest::Approx(f - lam * V0));
        CHECK(mode_fractional_wave_dt(1.5, lam, fr.W0, fr.W0prime, f, 0.0) == doctest::Approx(f - lam * V0));
    }
}

TEST_CASE("assembled field") {
    const auto& sys = zero_system();
    const auto t = make_time_grid(1.0, 2.0, 4, 5);
    CHECK(t.size() == 10);
    CHECK(t.front() == -1.0);
    CHECK(t.back() == 2.0);
    CHECK(std::count(t.begin(), t.end(), 0.0) == 1);

    std::vector<ModeSolution> zero(3);
    for (int k = 0; k < 3; ++k) zero[k] = make_mode(k + 1, 2.0, sys.lambda[k], 0.0, 0.0);
    for (const auto& row : assemble_field(sys, zero, 0.5, 2.0, t).u) {
        for (double v : row) CHECK(v == 0.0);
    }

    const double f1 = 3.0;
    for (double beta : {2.0, 1.5}) {
        std::vector<ModeSolution> steady{make_mode(1, beta, sys.lambda[0], f1, f1 / sys.lambda[0])};
        const auto field = assemble_field(sys, steady, 0.5, beta, t);
        for (const auto& row : field.u) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                CHECK(std::abs(row[i] - f1 / sys.lambda[0] * sys.modes[0][i]) <= 1e-10);
            }
        }
    }

    std::vector<ModeSolution> modes;
    for (int k = 0; k < 6; ++k) modes.push_back(make_mode(k + 1, 1.5, sys.lambda[k], 1.0 / (k + 1), 0.2 * k));
    const auto field = assemble_field(sys, modes, 0.5, 1.5, t);
    for (const auto& row : field.u) {
        CHECK(std::abs(row.front()) <= 1e-8);
        CHECK(std::abs(row.back()) <= 1e-8);
    }
    const auto plus = field_at(sys, modes, 0.5, 1.5, 0.0);
    const auto minus = field_at(sys, modes, 0.5, 1.5, -1e-13);
    for (std::size_t i = 0; i < plus.size(); ++i) CHECK(std::abs(plus[i] - minus[i]) <= 1e-9);

    const auto csv = field_to_csv(field);
    CHECK(csv.header == std::vector<std::string>{"t", "x", "u"});
    CHECK(csv.rows() == t.size() * sys.grid.n);
    const auto js = field_to_json(field);
    CHECK(js["u"].size() == t.size() * sys.grid.n);
    CHECK(js["u"][sys.grid.n + 3].get<double>() == field.u[1][3]);
}

TEST_CASE("gluing residual") {
    const auto& sys = zero_system();
    const double alpha = 0.5, p = 1.0, q = 2.0;
    std::vector<ModeSolution> steady;
    for (int k = 0; k < 5; ++k) steady.push_back(make_mode(k + 1, 2.0, sys.lambda[k], 1.0, 1.0 / sys.lambda[k]));
    for (double ts : {0.1, 1e-3, 1e-6}) CHECK(gluing_residual(steady, alpha, 2.0, p, q, ts) <= 1e-8);

    // single mode: (f - lam V0) [E_{a,1}(-lam t^a) - cos(sqrt(lam) t)] + sqrt(lam) B sin(sqrt(lam) t)
    const double lam = sys.lambda[0], f = 2.0, V0 = 0.5, ts = 0.05;
    const auto m = make_mode(1, 2.0, lam, f, V0);
    const double s = std::sqrt(lam);
    const double lhs = (f - lam * V0) * mlf_eval({alpha, 1.0}, -lam * std::pow(ts, alpha));
    const double rhs = s * m.A * std::cos(s * ts) + s * m.B * std::sin(s * ts);
    CHECK(gluing_residual(std::vector<ModeSolution>{m}, alpha, 2.0, p, q, ts) == doctest::Approx(std::abs(lhs - rhs)).epsilon(1e-13));

    // smooth data: B_k ~ lam^-2, f_k decaying
    std::vector<ModeSolution> smooth;
    for (int k = 0; k < 12; ++k) {
        const double l = sys.lambda[k];
        const double fk = 1.0 / ((k + 1.0) * (k + 1.0));
        smooth.push_back(make_mode(k + 1, 2.0, l, fk, 1.0 / (l * l) + fk / l));
    }
    const double g1 = gluing_residual(smooth, alpha, 2.0, p, q, 1e-1);
    const double g2 = gluing_residual(smooth, alpha, 2.0, p, q, 1e-2);
    const double g3 = gluing_residual(smooth, alpha, 2.0, p, q, 1e-3);
    MESSAGE("gluing " << g1 << " " << g2 << " " << g3);
    CHECK(g3 < g1);
    CHECK_THROWS_AS(gluing_residual(smooth, alpha, 2.0, p, q, 0.2), Error);
}

TEST_CASE("truncation tail model") {
    std::vector<double> lam, c;
    for (int k = 1; k <= 10; ++k) {
        lam.push_back(k * k * M_PI * M_PI);
        c.push_back(2.0 / (lam.back() * lam.back()));
    }
    const double K = 10.5;
    CHECK(truncation_tail_estimate(c, lam) ==
          doctest::Approx(std::sqrt(2.0) * 2.0 / (3.0 * std::pow(M_PI, 4) * K * K * K)).epsilon(1e-12));
    CHECK(truncation_tail_estimate({}, {}) == 0.0);
}

TEST_CASE("problem spec validation") {
    ProblemSpec s;
    s.alpha = 0.5;
    s.beta = 1.5;
    CHECK_NOTHROW(s.validate());
    s.alpha = 1.2;
    CHECK_THROWS_AS(s.validate(), Error);
    s.alpha = 0.5;
    s.beta = 2.5;
    CHECK_THROWS_AS(s.validate(), Error);
    s.beta = 2.0;
    s.p = -1.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s.p = 1.0;
    s.phi = {0.5, 1.0, 0.0};
    s.psi = {0.0, 1.0, 0.0};
    CHECK_THROWS_AS(s.validate(), Error);
}
