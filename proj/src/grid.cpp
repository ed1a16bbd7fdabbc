#include "fracmix/grid.hpp"

#include <algorithm>
#include <cmath>

#include "fracmix/errors.hpp"

namespace fracmix {

UniformGrid::UniformGrid(double lo, double hi, std::size_t points) : a(lo), b(hi), n(points) {
    require(points >= 2, ErrorCode::InvalidArgument, "grid needs at least two points");
    require(lo < hi, ErrorCode::InvalidArgument, "grid requires a < b");
}

double UniformGrid::operator[](std::size_t i) const {
    if (i + 1 == n) return b;  // exact right endpoint
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::vector<double> UniformGrid::points() const {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (*this)[i];
    return x;
}

bool UniformGrid::same_as(const UniformGrid& other) const {
    return n == other.n && a == other.a && b == other.b;
}

std::vector<double> simpson_weights(const UniformGrid& grid) {
    const std::size_t n = grid.n;
    const double h = grid.step();
    std::vector<double> w(n, 0.0);
    if (n == 2) {
        w[0] = w[1] = h / 2.0;
        return w;
    }
    if (n == 4) {
        const double c = 3.0 * h / 8.0;
        w = {c, 3.0 * c, 3.0 * c, c};
        return w;
    }
    // Simpson on the first m points (m odd), 3/8 rule on the remainder.
    const std::size_t m = (n % 2 == 1) ? n : n - 3;
    for (std::size_t i = 0; i + 2 < m; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    if (m != n) {
        const double c = 3.0 * h / 8.0;
        w[m - 1] += c;
        w[m] += 3.0 * c;
        w[m + 1] += 3.0 * c;
        w[m + 2] += c;
    }
    return w;
}

double integrate(std::span<const double> weights, std::span<const double> v) {
    require(weights.size() == v.size(), ErrorCode::GridMismatch, "sample count differs from grid");
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += weights[i] * v[i];
    return s;
}

double inner(std::span<const double> weights, std::span<const double> u, std::span<const double> v) {
    require(weights.size() == u.size() && u.size() == v.size(), ErrorCode::GridMismatch,
            "sample count differs from grid");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += weights[i] * u[i] * v[i];
    return s;
}

double l2_norm(std::span<const double> weights, std::span<const double> v) {
    return std::sqrt(std::max(0.0, inner(weights, v, v)));
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace fracmix
