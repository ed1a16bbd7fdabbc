#include "fracmix/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "fracmix/errors.hpp"
#include "fracmix/interp.hpp"

namespace fracmix {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 10>;

double arc_integral(const RealFn& r, double lo, double hi) {
    if (hi == lo) return 0.0;
    return Gauss::integrate([&](double s) { return 1.0 / std::sqrt(r(s)); }, lo, hi);
}

}  // namespace

OperatorSpec OperatorSpec::identity() {
    OperatorSpec op;
    op.r = [](double) { return 1.0; };
    op.e = [](double) { return 0.0; };
    op.dr = [](double) { return 0.0; };
    op.d2r = [](double) { return 0.0; };
    return op;
}

OperatorSpec OperatorSpec::from_samples(const UniformGrid& grid, std::span<const double> r,
                                        std::span<const double> e) {
    require(r.size() == grid.n && e.size() == grid.n, ErrorCode::GridMismatch,
            "r and e samples must share the grid");
    for (double v : r) {
        require(v > 0.0, ErrorCode::NonPositiveR, "sampled r must be positive");
    }
    std::vector<double> d1, d2;
    fd_derivatives(grid, r, d1, d2);
    auto rs = std::make_shared<UniformSpline>(grid, r);
    auto es = std::make_shared<UniformSpline>(grid, e);
    auto d1s = std::make_shared<UniformSpline>(grid, d1);
    auto d2s = std::make_shared<UniformSpline>(grid, d2);
    OperatorSpec op;
    op.a = grid.a;
    op.b = grid.b;
    op.r = [rs](double x) { return (*rs)(x); };
    op.e = [es](double x) { return (*es)(x); };
    op.dr = [d1s](double x) { return (*d1s)(x); };
    op.d2r = [d2s](double x) { return (*d2s)(x); };
    return op;
}

double LiouvilleMap::z_of_x(double x) const {
    x = std::clamp(x, x_grid.a, x_grid.b);
    const double h = x_grid.step();
    const auto i = std::min<std::size_t>(static_cast<std::size_t>((x - x_grid.a) / h), x_grid.n - 2);
    return z_at_x[i] + arc_integral(r, x_grid[i], x) / K;
}

double LiouvilleMap::x_of_z(double z) const {
    z = std::clamp(z, 0.0, 1.0);
    auto it = std::upper_bound(z_at_x.begin(), z_at_x.end(), z);
    std::size_t i = it == z_at_x.begin() ? 0 : static_cast<std::size_t>(it - z_at_x.begin()) - 1;
    i = std::min(i, x_grid.n - 2);
    const double x0 = x_grid[i];
    const double x1 = x_grid[i + 1];
    const double z0 = z_at_x[i];
    const double z1 = z_at_x[i + 1];
    double x = x0 + (x1 - x0) * (z - z0) / (z1 - z0);
    // Newton on z(x) = z inside the cell; z' = r^{-1/2} / K.
    for (int it_n = 0; it_n < 30; ++it_n) {
        const double f = z0 + arc_integral(r, x0, x) / K - z;
        const double step = f * K * std::sqrt(r(x));
        x = std::clamp(x - step, x0, x1);
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

LiouvilleMap build_map(const OperatorSpec& op, std::size_t n_grid, double g_cap) {
    require(op.a < op.b, ErrorCode::InvalidArgument, "operator interval requires a < b");
    require(n_grid >= 64, ErrorCode::InvalidArgument, "n_grid must be at least 64");
    require(static_cast<bool>(op.r) && static_cast<bool>(op.e), ErrorCode::InvalidArgument,
            "operator needs both r and e");

    LiouvilleMap map;
    map.r = op.r;
    map.x_grid = UniformGrid(op.a, op.b, n_grid);
    map.z_grid = UniformGrid(0.0, 1.0, n_grid);
    const auto& xg = map.x_grid;

    std::vector<double> r_at(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) {
        r_at[i] = op.r(xg[i]);
        if (!(r_at[i] > 0.0)) {
            std::ostringstream os;
            os << "r(" << xg[i] << ") = " << r_at[i] << " is not positive";
            fail(ErrorCode::NonPositiveR, os.str());
        }
    }

    // Cumulative arc length int_a^x r^{-1/2}.
    std::vector<double> cum(n_grid, 0.0);
    for (std::size_t i = 1; i < n_grid; ++i) cum[i] = cum[i - 1] + arc_integral(op.r, xg[i - 1], xg[i]);
    map.K = cum.back();
    require(map.K > 0.0 && std::isfinite(map.K), ErrorCode::NonPositiveR, "K must be positive");
    map.z_at_x.resize(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) map.z_at_x[i] = cum[i] / map.K;
    map.z_at_x.back() = 1.0;

    map.l_at_x.resize(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) map.l_at_x[i] = std::pow(r_at[i], 0.25);

    RealFn dr = op.dr;
    RealFn d2r = op.d2r;
    if (!dr || !d2r) {
        std::vector<double> d1, d2;
        fd_derivatives(xg, r_at, d1, d2);
        auto d1s = std::make_shared<UniformSpline>(xg, d1);
        auto d2s = std::make_shared<UniformSpline>(xg, d2);
        if (!dr) dr = [d1s](double x) { return (*d1s)(x); };
        if (!d2r) d2r = [d2s](double x) { return (*d2s)(x); };
    }

    map.x_at_z.resize(n_grid);
    map.l_at_z.resize(n_grid);
    map.g.resize(n_grid);
    const double K2 = map.K * map.K;
    double g_min = 0.0;
    double g_scale = 0.0;
    for (std::size_t j = 0; j < n_grid; ++j) {
        const double x = (j == 0) ? op.a : (j + 1 == n_grid) ? op.b : map.x_of_z(map.z_grid[j]);
        map.x_at_z[j] = x;
        const double rv = op.r(x);
        const double r1 = dr(x);
        map.l_at_z[j] = std::pow(rv, 0.25);
        // l (r l' / l^2)' with l = r^{1/4} reduces to r''/4 - r'^2 / (16 r).
        const double gv = K2 * (op.e(x) + d2r(x) / 4.0 - r1 * r1 / (16.0 * rv));
        if (!std::isfinite(gv) || std::abs(gv) > g_cap) {
            std::ostringstream os;
            os << "normal-form potential g(" << map.z_grid[j] << ") = " << gv << " exceeds the cap "
               << g_cap;
            fail(ErrorCode::SingularPotential, os.str());
        }
        map.g[j] = gv;
        g_min = std::min(g_min, gv);
        g_scale = std::max(g_scale, std::abs(gv));
    }
    if (g_min < -1e-10 * std::max(1.0, g_scale)) {
        std::ostringstream os;
        os << "normal-form potential has min g = " << g_min << " < 0";
        fail(ErrorCode::NonPositivePotential, os.str());
    }
    for (double& gv : map.g) gv = std::max(gv, 0.0);
    return map;
}

std::vector<double> push_function(const LiouvilleMap& map, const RealFn& v) {
    std::vector<double> out(map.z_grid.n);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = map.l_at_z[j] * v(map.x_at_z[j]);
    return out;
}

std::vector<double> push_samples(const LiouvilleMap& map, std::span<const double> v) {
    require(v.size() == map.x_grid.n, ErrorCode::GridMismatch, "samples must live on the x grid");
    const UniformLagrange s(map.x_grid, v);
    return push_function(map, [&](double x) { return s(x); });
}

std::vector<double> pull_function(const LiouvilleMap& map, std::span<const double> vbar) {
    require(vbar.size() == map.z_grid.n, ErrorCode::GridMismatch, "samples must live on the z grid");
    const UniformLagrange s(map.z_grid, vbar);
    std::vector<double> out(map.x_grid.n);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s(map.z_at_x[i]) / map.l_at_x[i];
    return out;
}

double eigenvalue_pullback(const LiouvilleMap& map, double lambda) { return lambda / (map.K * map.K); }

}  // namespace fracmix
