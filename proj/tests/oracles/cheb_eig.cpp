#include "cheb_eig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace oracle {

std::vector<double> cheb_eigenvalues(double a, double b, const std::function<double(double)>& r,
                                     const std::function<double(double)>& dr,
                                     const std::function<double(double)>& e, int n) {
    // Trefethen's differentiation matrix on x_j = cos(j pi / n).
    Eigen::VectorXd x(n + 1), c(n + 1);
    for (int j = 0; j <= n; ++j) {
        x(j) = std::cos(std::numbers::pi * j / n);
        c(j) = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
    }
    Eigen::MatrixXd D(n + 1, n + 1);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            D(i, j) = i == j ? 0.0 : (c(i) / c(j)) / (x(i) - x(j));
        }
    }
    for (int i = 0; i <= n; ++i) D(i, i) = -D.row(i).sum();

    const double s = 2.0 / (b - a);
    const Eigen::MatrixXd D1 = s * D;
    const Eigen::MatrixXd D2 = D1 * D1;
    Eigen::MatrixXd A(n - 1, n - 1);
    for (int i = 1; i < n; ++i) {
        const double xi = a + (x(i) + 1.0) / s;
        for (int j = 1; j < n; ++j) {
            A(i - 1, j - 1) = -r(xi) * D2(i, j) - dr(xi) * D1(i, j) + (i == j ? e(xi) : 0.0);
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    std::vector<double> out;
    for (int i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i).real());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace oracle
