#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>

#include "cheb_eig.hpp"
#include "fracmix/errors.hpp"
#include "fracmix/interp.hpp"
#include "fracmix/spectral.hpp"

using namespace fracmix;

namespace {

constexpr double kPi = M_PI;

const EigenSystem& zero_system() {
    static const EigenSystem sys = solve_eigensystem([](double) { return 0.0; }, 64, 2049);
    return sys;
}

double g_sin(double x) { return std::sin(3.0 * kPi * x) + 1.0; }

const EigenSystem& sin_system() {
    static const EigenSystem sys = solve_eigensystem(g_sin, 64, 2049);
    return sys;
}

double sup_diff_sine(const EigenSystem& sys, std::size_t k) {
    double d = 0.0;
    for (std::size_t i = 0; i < sys.grid.n; ++i) {
        d = std::max(d, std::abs(sys.modes[k][i] - std::sqrt(2.0) * std::sin((k + 1.0) * kPi * sys.grid[i])));
    }
    return d;
}

}  // namespace

TEST_CASE("Dirichlet Laplacian") {
    const auto& sys = zero_system();
    for (std::size_t k = 0; k < 20; ++k) {
        const double kk = (k + 1.0) * kPi;
        CHECK(std::abs(sys.lambda[k] / (kk * kk) - 1.0) <= 1e-6);
        CHECK(sup_diff_sine(sys, k) <= 1e-6);
    }
}

TEST_CASE("structural invariants") {
    for (const EigenSystem* s : {&zero_system(), &sin_system()}) {
        const auto& sys = *s;
        for (std::size_t k = 0; k < 20; ++k) {
            CHECK(std::abs(l2_norm(sys.weights, sys.modes[k]) - 1.0) <= 1e-10);
            CHECK(sys.modes[k].front() == 0.0);
            CHECK(sys.modes[k].back() == 0.0);
            CHECK(sys.modes[k][1] > 0.0);
            if (k > 0) CHECK(sys.lambda[k] > sys.lambda[k - 1]);
            for (std::size_t j = 0; j < k; ++j) CHECK(std::abs(inner(sys.weights, sys.modes[j], sys.modes[k])) <= 1e-8);
        }
        CHECK(sys.lambda[0] > 0.0);
    }
}

TEST_CASE("constant shift") {
    const auto shifted = solve_eigensystem([](double) { return 5.0; }, 20, 2049);
    const auto& base = zero_system();
    // Exact for the matrices; the eigensolver is accurate to eps ||T|| on the
    // fine mesh (||T|| ~ 4 / h^2), amplified by the extrapolation weights.
    const double h = 0.5 / 2048.0;
    const double floor = 8.0 * 2.2e-16 * 4.0 / (h * h);
    for (std::size_t k = 0; k < 20; ++k) {
        CHECK(std::abs(shifted.lambda[k] - base.lambda[k] - 5.0) <= floor);
        double d = 0.0;
        for (std::size_t i = 0; i < base.grid.n; ++i) d = std::max(d, std::abs(shifted.modes[k][i] - base.modes[k][i]));
        CHECK(d <= 1e-9);
    }
    const auto exact = constant_potential_system(5.0, 20, 2049);
    for (std::size_t k = 0; k < 20; ++k) {
        const double kk = (k + 1.0) * kPi;
        CHECK(std::abs(exact.lambda[k] / (kk * kk + 5.0) - 1.0) <= 1e-15);
        CHECK(std::abs(shifted.lambda[k] / exact.lambda[k] - 1.0) <= 1e-6);
    }
}

TEST_CASE("g = x against a Chebyshev collocation solve") {
    const auto sys = solve_eigensystem([](double x) { return x; }, 8, 2049);
    const auto ref = oracle::cheb_eigenvalues(0.0, 1.0, [](double) { return 1.0; }, [](double) { return 0.0; },
                                              [](double x) { return x; }, 64);
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(sys.lambda[k] / ref[k] - 1.0) <= 1e-8);
    // Sampled input takes the interpolated route on the fine mesh.
    std::vector<double> g(2049);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = sys.grid[i];
    const auto sampled = solve_eigensystem(g, 8, 2049);
    for (std::size_t k = 0; k < 8; ++k) CHECK(std::abs(sampled.lambda[k] / ref[k] - 1.0) <= 1e-8);
}

TEST_CASE("eigenvalue asymptotics") {
    const auto& sys = sin_system();
    auto residual = [&](int k) {
        const double kk = k * kPi;
        const double mean = 1.0 + 2.0 / (3.0 * kPi);
        const double cosine = 1.0 / ((3.0 + 2.0 * k) * kPi) + 1.0 / ((3.0 - 2.0 * k) * kPi);
        return sys.lambda[k - 1] - kk * kk - mean + cosine;
    };
    MESSAGE("residual k=10 " << residual(10) << ", k=20 " << residual(20));
    CHECK(std::abs(residual(20)) <= 0.5 * std::abs(residual(10)));
    CHECK(sup_diff_sine(sys, 39) < sup_diff_sine(sys, 19));
    CHECK(sup_diff_sine(sys, 19) < sup_diff_sine(sys, 9));
    CHECK(sup_diff_sine(sys, 9) < sup_diff_sine(sys, 4));
}

TEST_CASE("differential residual") {
    const auto& sys = sin_system();
    for (std::size_t k = 0; k < 10; ++k) {
        std::vector<double> d1, d2, r(sys.grid.n);
        fd_derivatives(sys.grid, sys.modes[k], d1, d2);
        for (std::size_t i = 0; i < r.size(); ++i) {
            r[i] = d2[i] - sys.potential[i] * sys.modes[k][i] + sys.lambda[k] * sys.modes[k][i];
        }
        CHECK(l2_norm(sys.weights, r) <= 1e-6 * sys.lambda[k]);
    }
}

TEST_CASE("projection and synthesis") {
    const auto& sys = zero_system();
    auto c = project(sys, sys.modes[1]);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(c[k] - (k == 1 ? 1.0 : 0.0)) <= 1e-8);

    std::vector<double> v(sys.grid.n);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 3.0 * sys.modes[0][i] - 2.0 * sys.modes[2][i];
    c = project(sys, v);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(c[k] - (k == 0 ? 3.0 : k == 2 ? -2.0 : 0.0)) <= 1e-8);
    const auto back = synthesize(sys, c);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(back[i] - v[i]) <= 1e-8);

    // x(1-x): (x(1-x), sqrt2 sin k pi x) = 2 sqrt2 (1 - (-1)^k) / (k pi)^3
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = sys.grid[i] * (1.0 - sys.grid[i]);
    c = project(sys, v);
    for (std::size_t k = 0; k < 20; ++k) {
        const double kk = (k + 1.0) * kPi;
        const double ref = 2.0 * std::sqrt(2.0) * (1.0 - (k % 2 == 0 ? -1.0 : 1.0)) / (kk * kk * kk);
        CHECK(std::abs(c[k] - ref) <= 1e-9);
    }
    // Truncation error ~ K^{-2.5}.
    auto trunc = [&](std::size_t K) {
        std::vector<double> ck(c.begin(), c.begin() + static_cast<long>(K));
        const auto s = synthesize(sys, ck);
        std::vector<double> d(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = v[i] - s[i];
        return l2_norm(sys.weights, d);
    };
    const double slope = std::log2(trunc(8) / trunc(32)) / 2.0;
    MESSAGE("truncation decay exponent " << slope);
    CHECK(slope == doctest::Approx(2.5).epsilon(0.08));

    CHECK_THROWS_AS(project(sys, std::vector<double>(100, 0.0)), Error);
    CHECK_THROWS_AS(synthesize(sys, std::vector<double>(65, 0.0)), Error);
}

TEST_CASE("json round trip") {
    const auto sys = solve_eigensystem([](double x) { return x * x; }, 4, 129);
    const auto back = eigensystem_from_json(eigensystem_to_json(sys));
    CHECK(back.grid.same_as(sys.grid));
    CHECK(back.lambda == sys.lambda);
    CHECK(back.modes == sys.modes);
    CHECK(back.potential == sys.potential);
    CHECK_THROWS_AS(eigensystem_from_json(Json::object()), Error);
}

TEST_CASE("preconditions") {
    auto code = [](const std::function<void()>& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    CHECK(code([] { solve_eigensystem([](double) { return 0.0; }, 300, 2049); }) == ErrorCode::ResolutionTooLow);
    CHECK(code([] { solve_eigensystem([](double x) { return x - 0.5; }, 4, 129); }) == ErrorCode::NonPositivePotential);
    CHECK(code([] { solve_eigensystem(std::vector<double>(100, 0.0), 4, 129); }) == ErrorCode::GridMismatch);
    CHECK(code([] { constant_potential_system(-1.0, 4, 129); }) == ErrorCode::NonPositivePotential);
}
