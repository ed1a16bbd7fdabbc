#include "fracmix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracmix/errors.hpp"
#include "fracmix/interp.hpp"
#include "fracmix/mlf.hpp"

extern "C" void dstevr_(const char* jobz, const char* range, const int* n, double* d, double* e,
                        const double* vl, const double* vu, const int* il, const int* iu,
                        const double* abstol, int* m, double* w, double* z, const int* ldz,
                        int* isuppz, double* work, const int* lwork, int* iwork, const int* liwork,
                        int* info);

namespace fracmix {

namespace {

struct RawModes {
    std::vector<double> lambda;
    std::vector<std::vector<double>> vec;  // full grid including the zero endpoints
};

// Lowest n_modes eigenpairs of the 3-point Laplacian plus diag(g) on
// `intervals` cells; g sampled at the interior nodes.
RawModes tridiagonal_modes(std::span<const double> g_interior, std::size_t n_modes) {
    const int n = static_cast<int>(g_interior.size());
    const double h = 1.0 / static_cast<double>(n + 1);
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> d(n), e(std::max(n, 1));
    for (int i = 0; i < n; ++i) d[i] = 2.0 * inv_h2 + g_interior[i];
    for (int i = 0; i + 1 < n; ++i) e[i] = -inv_h2;

    const char jobz = 'V', range = 'I';
    const int il = 1, iu = static_cast<int>(n_modes);
    const double vl = 0.0, vu = 0.0, abstol = 0.0;
    int m = 0, info = 0;
    std::vector<double> w(n), z(static_cast<std::size_t>(n) * n_modes);
    std::vector<int> isuppz(2 * n_modes);
    int lwork = -1, liwork = -1, iwork_query = 0;
    double work_query = 0.0;
    dstevr_(&jobz, &range, &n, d.data(), e.data(), &vl, &vu, &il, &iu, &abstol, &m, w.data(), z.data(),
            &n, isuppz.data(), &work_query, &lwork, &iwork_query, &liwork, &info);
    lwork = static_cast<int>(work_query);
    liwork = iwork_query;
    std::vector<double> work(lwork);
    std::vector<int> iwork(liwork);
    dstevr_(&jobz, &range, &n, d.data(), e.data(), &vl, &vu, &il, &iu, &abstol, &m, w.data(), z.data(),
            &n, isuppz.data(), work.data(), &lwork, iwork.data(), &liwork, &info);
    require(info == 0 && m == iu, ErrorCode::InvalidArgument,
            "tridiagonal eigensolver failed (info " + std::to_string(info) + ")");

    RawModes out;
    out.lambda.assign(w.begin(), w.begin() + m);
    out.vec.resize(m);
    for (int k = 0; k < m; ++k) {
        auto& v = out.vec[k];
        v.assign(n + 2, 0.0);
        for (int i = 0; i < n; ++i) v[i + 1] = z[static_cast<std::size_t>(k) * n + i];
    }
    return out;
}

void normalize(std::vector<double>& v, std::span<const double> weights) {
    const double nrm = l2_norm(weights, v);
    // Sign convention: positive slope at x = 0.
    const double s = (v[1] < 0.0 ? -1.0 : 1.0) / nrm;
    for (double& x : v) x *= s;
}

void check_request(std::size_t n_modes, std::size_t n_grid) {
    require(n_grid >= 17, ErrorCode::InvalidArgument, "n_grid must be at least 17");
    require(n_modes >= 1, ErrorCode::InvalidArgument, "n_modes must be positive");
    if (8 * n_modes > n_grid) {
        std::ostringstream os;
        os << "n_modes = " << n_modes << " exceeds n_grid / 8 = " << n_grid / 8;
        fail(ErrorCode::ResolutionTooLow, os.str());
    }
}

void check_potential(std::span<const double> g) {
    for (double v : g) {
        if (!std::isfinite(v)) fail(ErrorCode::SingularPotential, "potential is not finite");
        if (v < 0.0) {
            std::ostringstream os;
            os << "potential has negative value " << v;
            fail(ErrorCode::NonPositivePotential, os.str());
        }
    }
}

EigenSystem assemble(const UniformGrid& grid, std::vector<double> g_coarse, const RealFn& g_at,
                     std::size_t n_modes, SpectralOptions opts) {
    const std::size_t n = grid.n;
    EigenSystem sys;
    sys.grid = grid;
    sys.weights = simpson_weights(grid);
    sys.potential = std::move(g_coarse);

    std::vector<double> gi(sys.potential.begin() + 1, sys.potential.end() - 1);
    RawModes coarse = tridiagonal_modes(gi, n_modes);
    for (auto& v : coarse.vec) normalize(v, sys.weights);

    if (!opts.richardson) {
        sys.lambda = std::move(coarse.lambda);
        sys.modes = std::move(coarse.vec);
        return sys;
    }

    const UniformGrid fine(0.0, 1.0, 2 * n - 1);
    std::vector<double> gf(fine.n - 2);
    for (std::size_t i = 1; i + 1 < fine.n; ++i) {
        gf[i - 1] = (i % 2 == 0) ? sys.potential[i / 2] : g_at(fine[i]);
    }
    RawModes refined = tridiagonal_modes(gf, n_modes);

    sys.lambda.resize(n_modes);
    sys.modes.resize(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k) {
        sys.lambda[k] = (4.0 * refined.lambda[k] - coarse.lambda[k]) / 3.0;
        std::vector<double> vf(n);
        for (std::size_t i = 0; i < n; ++i) vf[i] = refined.vec[k][2 * i];
        normalize(vf, sys.weights);
        auto& v = sys.modes[k];
        v.resize(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = (4.0 * vf[i] - coarse.vec[k][i]) / 3.0;
    }
    // Re-orthonormalize (modified Gram-Schmidt in the Simpson inner product).
    for (std::size_t k = 0; k < n_modes; ++k) {
        auto& v = sys.modes[k];
        for (std::size_t j = 0; j < k; ++j) {
            const double c = inner(sys.weights, v, sys.modes[j]);
            for (std::size_t i = 0; i < n; ++i) v[i] -= c * sys.modes[j][i];
        }
        normalize(v, sys.weights);
    }
    return sys;
}

}  // namespace

EigenSystem solve_eigensystem(std::span<const double> g, std::size_t n_modes, std::size_t n_grid,
                              SpectralOptions opts) {
    check_request(n_modes, n_grid);
    require(g.size() == n_grid, ErrorCode::GridMismatch, "potential samples do not match n_grid");
    check_potential(g);
    const UniformGrid grid(0.0, 1.0, n_grid);
    const UniformSpline spline(grid, g);
    return assemble(grid, std::vector<double>(g.begin(), g.end()),
                    [&](double x) { return std::max(0.0, spline(x)); }, n_modes, opts);
}

EigenSystem solve_eigensystem(const RealFn& g, std::size_t n_modes, std::size_t n_grid,
                              SpectralOptions opts) {
    check_request(n_modes, n_grid);
    const UniformGrid grid(0.0, 1.0, n_grid);
    std::vector<double> gs(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) gs[i] = g(grid[i]);
    check_potential(gs);
    return assemble(grid, std::move(gs), g, n_modes, opts);
}

EigenSystem constant_potential_system(double c, std::size_t n_modes, std::size_t n_grid) {
    check_request(n_modes, n_grid);
    require(c >= 0.0, ErrorCode::NonPositivePotential, "constant potential must be non-negative");
    constexpr double pi = std::numbers::pi;
    EigenSystem sys;
    sys.grid = UniformGrid(0.0, 1.0, n_grid);
    sys.weights = simpson_weights(sys.grid);
    sys.potential.assign(n_grid, c);
    sys.lambda.resize(n_modes);
    sys.modes.resize(n_modes);
    for (std::size_t k = 1; k <= n_modes; ++k) {
        const double kk = static_cast<double>(k);
        sys.lambda[k - 1] = kk * kk * pi * pi + c;
        auto& v = sys.modes[k - 1];
        v.resize(n_grid);
        for (std::size_t i = 0; i < n_grid; ++i) {
            const double arg = kk * static_cast<double>(i) / static_cast<double>(n_grid - 1);
            v[i] = std::numbers::sqrt2 * sin_pi(arg);
        }
    }
    return sys;
}

std::vector<double> project(const EigenSystem& sys, std::span<const double> v, std::size_t n_modes) {
    require(v.size() == sys.grid.n, ErrorCode::GridMismatch, "samples do not match the eigen grid");
    const std::size_t m = n_modes == 0 ? sys.n_modes() : std::min(n_modes, sys.n_modes());
    std::vector<double> c(m);
    for (std::size_t k = 0; k < m; ++k) c[k] = inner(sys.weights, v, sys.modes[k]);
    return c;
}

std::vector<double> synthesize(const EigenSystem& sys, std::span<const double> c) {
    require(c.size() <= sys.n_modes(), ErrorCode::GridMismatch, "more coefficients than modes");
    std::vector<double> v(sys.grid.n, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] == 0.0) continue;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += c[k] * sys.modes[k][i];
    }
    return v;
}

Json eigensystem_to_json(const EigenSystem& sys) {
    Json doc;
    doc["grid"] = {{"a", sys.grid.a}, {"b", sys.grid.b}, {"n", sys.grid.n}};
    doc["n_modes"] = sys.n_modes();
    doc["potential"] = sys.potential;
    doc["lambda"] = sys.lambda;
    doc["modes"] = sys.modes;
    return doc;
}

EigenSystem eigensystem_from_json(const Json& doc) {
    try {
        EigenSystem sys;
        const auto& g = doc.at("grid");
        sys.grid = UniformGrid(g.at("a").get<double>(), g.at("b").get<double>(),
                               g.at("n").get<std::size_t>());
        sys.weights = simpson_weights(sys.grid);
        sys.potential = doc.at("potential").get<std::vector<double>>();
        sys.lambda = doc.at("lambda").get<std::vector<double>>();
        sys.modes = doc.at("modes").get<std::vector<std::vector<double>>>();
        require(sys.potential.size() == sys.grid.n && sys.modes.size() == sys.lambda.size(),
                ErrorCode::GridMismatch, "eigensystem document is inconsistent");
        for (const auto& m : sys.modes) {
            require(m.size() == sys.grid.n, ErrorCode::GridMismatch, "mode length differs from grid");
        }
        return sys;
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCode::InputError, std::string("eigensystem document: ") + ex.what());
    }
}

}  // namespace fracmix
