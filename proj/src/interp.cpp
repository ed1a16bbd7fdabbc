#include "fracmix/interp.hpp"

#include <algorithm>
#include <cmath>

#include "fracmix/errors.hpp"

namespace fracmix {

namespace {

// One-sided 5-point slope at the left end: invert the sign and order for the right.
double left_slope(std::span<const double> v, double h) {
    return (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / (12.0 * h);
}

double right_slope(std::span<const double> v, double h) {
    const std::size_t n = v.size();
    return (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) /
           (12.0 * h);
}

}  // namespace

UniformSpline::UniformSpline(const UniformGrid& grid, std::span<const double> values)
    : lo_(grid.a), hi_(grid.b) {
    require(values.size() == grid.n, ErrorCode::GridMismatch, "spline samples do not match grid");
    require(grid.n >= 5, ErrorCode::InvalidArgument, "spline needs at least five samples");
    const double h = grid.step();
    spline_ = boost::math::interpolators::cardinal_cubic_b_spline<double>(
        values.data(), values.size(), grid.a, h, left_slope(values, h), right_slope(values, h));
}

double UniformSpline::operator()(double x) const { return spline_(std::clamp(x, lo_, hi_)); }

double UniformSpline::prime(double x) const { return spline_.prime(std::clamp(x, lo_, hi_)); }

UniformLagrange::UniformLagrange(const UniformGrid& grid, std::span<const double> values)
    : grid_(grid), v_(values.begin(), values.end()) {
    require(values.size() == grid.n, ErrorCode::GridMismatch, "interpolation samples do not match grid");
    require(grid.n >= 8, ErrorCode::InvalidArgument, "interpolation needs at least eight samples");
}

double UniformLagrange::operator()(double x) const {
    constexpr int kPts = 8;
    double t = (std::clamp(x, grid_.a, grid_.b) - grid_.a) / grid_.step();
    // grid[i] is a + i h rounded, so t can miss the integer by an ulp or two.
    if (std::abs(t - std::round(t)) <= 1e-13 * std::max(1.0, t)) t = std::round(t);
    const auto last = static_cast<long>(grid_.n) - kPts;
    const long i0 = std::clamp(static_cast<long>(std::floor(t)) - kPts / 2 + 1, 0L, last);
    double acc = 0.0;
    for (int j = 0; j < kPts; ++j) {
        const double dj = t - static_cast<double>(i0 + j);
        if (dj == 0.0) return v_[static_cast<std::size_t>(i0 + j)];
        double w = 1.0;
        for (int m = 0; m < kPts; ++m) {
            if (m != j) w *= (t - static_cast<double>(i0 + m)) / static_cast<double>(j - m);
        }
        acc += w * v_[static_cast<std::size_t>(i0 + j)];
    }
    return acc;
}

void fd_derivatives(const UniformGrid& grid, std::span<const double> v, std::vector<double>& d1,
                    std::vector<double>& d2) {
    const std::size_t n = grid.n;
    require(v.size() == n, ErrorCode::GridMismatch, "derivative samples do not match grid");
    require(n >= 6, ErrorCode::InvalidArgument, "fourth-order differences need six samples");
    const double h = grid.step();
    d1.assign(n, 0.0);
    d2.assign(n, 0.0);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        d1[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
        d2[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / (12.0 * h * h);
    }
    // Boundary rows: forward/backward stencils, 4th order for d1 and d2 (six points).
    auto fwd = [&](std::size_t i, double sgn, auto at) {
        const double f0 = at(i), f1 = at(i + 1), f2 = at(i + 2), f3 = at(i + 3), f4 = at(i + 4),
                     f5 = at(i + 5);
        const double first = sgn * (-25.0 * f0 + 48.0 * f1 - 36.0 * f2 + 16.0 * f3 - 3.0 * f4) / (12.0 * h);
        const double second =
            (45.0 * f0 - 154.0 * f1 + 214.0 * f2 - 156.0 * f3 + 61.0 * f4 - 10.0 * f5) / (12.0 * h * h);
        return std::pair{first, second};
    };
    // Off-centre rows 1 and n-2 use stencils shifted by one point.
    auto shifted = [&](double fm1, double f0, double f1, double f2, double f3, double f4, double sgn) {
        const double first = sgn * (-3.0 * fm1 - 10.0 * f0 + 18.0 * f1 - 6.0 * f2 + f3) / (12.0 * h);
        const double second =
            (10.0 * fm1 - 15.0 * f0 - 4.0 * f1 + 14.0 * f2 - 6.0 * f3 + f4) / (12.0 * h * h);
        return std::pair{first, second};
    };
    auto left = [&](std::size_t k) { return v[k]; };
    auto right = [&](std::size_t k) { return v[n - 1 - k]; };
    std::tie(d1[0], d2[0]) = fwd(0, 1.0, left);
    std::tie(d1[n - 1], d2[n - 1]) = fwd(0, -1.0, right);
    std::tie(d1[1], d2[1]) = shifted(v[0], v[1], v[2], v[3], v[4], v[5], 1.0);
    std::tie(d1[n - 2], d2[n - 2]) =
        shifted(v[n - 1], v[n - 2], v[n - 3], v[n - 4], v[n - 5], v[n - 6], -1.0);
}

}  // namespace fracmix
