#include "fracmix/mlf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracmix/errors.hpp"

namespace fracmix {

namespace {

constexpr double kPi = std::numbers::pi;

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

// 1/Gamma for arguments of the form beta - alpha k, where rounding can land a
// hair away from a pole and leave a spurious tiny term.
double rgamma_expansion(double x) {
    const double r = std::round(x);
    if (r <= 0.0 && std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) return 0.0;
    return rgamma(x);
}

}  // namespace

void MlfParams::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        std::ostringstream os;
        os << "alpha must lie in (0, 2), got " << alpha;
        fail(ErrorCode::InvalidOrder, os.str());
    }
    if (!std::isfinite(beta)) {
        fail(ErrorCode::InvalidOrder, "beta must be finite");
    }
}

double sin_pi(double x) {
    double r = std::remainder(x, 2.0);  // r in [-1, 1]
    if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
    if (r > 0.5) r = 1.0 - r;
    else if (r < -0.5) r = -1.0 - r;
    return std::sin(kPi * r);
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    if (x > 171.0) return std::exp(-std::lgamma(x));
    if (x < -169.0) {
        // Reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi.
        return sin_pi(x) * std::exp(std::lgamma(1.0 - x)) / kPi;
    }
    return 1.0 / std::tgamma(x);
}

namespace detail {

double mlf_series(double alpha, double beta, double z) {
    CompensatedSum acc;
    double zn = 1.0;
    int small_run = 0;
    for (int n = 0; n < 20000; ++n) {
        const double term = zn * rgamma(alpha * n + beta);
        acc.add(term);
        const double mag = std::abs(acc.value());
        if (alpha * n + beta > 2.0 && std::abs(term) <= 1e-17 * mag) {
            if (++small_run >= 2) break;
        } else {
            small_run = 0;
        }
        zn *= z;
        if (zn == 0.0) break;
    }
    return acc.value();
}

double mlf_pole_contribution(double alpha, double beta, double z) {
    if (!(alpha > 1.0) || !(z < 0.0)) return 0.0;
    // Poles s* = |z|^{1/a} exp(+-i pi / a); the pair contributes 2 Re[...].
    const std::complex<double> s =
        std::polar(std::pow(-z, 1.0 / alpha), kPi / alpha);
    const std::complex<double> r = std::pow(s, 1.0 - beta) * std::exp(s);
    return 2.0 / alpha * r.real();
}

bool mlf_try_asymptotic(double alpha, double beta, double z, double& out) {
    if (!(z < 0.0)) return false;
    const double x = -z;
    const double y = std::pow(x, 1.0 / alpha);
    // Decay rate of the exponentially small remainder along the negative axis.
    const double kappa = alpha <= 2.0 / 3.0 ? 1.0 : -std::cos(kPi / alpha);
    if (kappa <= 0.0) return false;

    const bool terminates = alpha == 1.0 && beta == std::floor(beta);
    CompensatedSum acc;
    double xk = 1.0;
    double prev_mag = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int k = 1; k <= 400; ++k) {
        xk /= x;
        const double sign = (k % 2 == 0) ? -1.0 : 1.0;  // -(-1)^k
        const double term = sign * xk * rgamma_expansion(beta - alpha * k);
        if (term == 0.0) {
            if (terminates && beta - alpha * k <= 0.0) {
                converged = true;
                break;
            }
            continue;
        }
        const double mag = std::abs(term);
        if (mag > prev_mag) break;  // divergence sets in
        prev_mag = mag;
        acc.add(term);
        if (mag <= 1e-17 * std::abs(acc.value())) {
            converged = true;
            break;
        }
    }
    if (!converged) return false;
    const double algebraic = acc.value();
    const double scale = std::abs(algebraic);
    if (!(scale > 0.0)) return false;
    // Remainder bound ~ y^{|1-beta|/alpha + 1} exp(-kappa y) relative to the sum.
    const double log_bound = -kappa * y + (std::abs(1.0 - beta) / alpha + 1.0) * std::log(y + 1.0);
    if (log_bound > std::log(1e-17 * scale)) return false;
    out = algebraic + mlf_pole_contribution(alpha, beta, z);
    return true;
}

}  // namespace detail

double mlf_eval(MlfParams params, double z) {
    params.validate();
    if (std::isnan(z)) fail(ErrorCode::InvalidArgument, "z is NaN");
    if (z > 1.0) {
        std::ostringstream os;
        os << "z = " << z << " lies in the growth regime z > 1";
        fail(ErrorCode::UnsupportedRegion, os.str());
    }
    if (std::isinf(z)) return 0.0;
    // Pure exponential: no algebraic tail, so the contour's absolute error
    // floor would swamp the relative accuracy for large |z|.
    if (params.alpha == 1.0 && params.beta == 1.0) return std::exp(z);
    if (std::abs(z) <= kSeriesRadius) {
        return detail::mlf_series(params.alpha, params.beta, z);
    }
    if (-z >= kAsymptoticRadius) {
        double value = 0.0;
        if (detail::mlf_try_asymptotic(params.alpha, params.beta, z, value)) {
            return value;
        }
    }
    return detail::mlf_contour(params.alpha, params.beta, z);
}

double mlf_asymptotic(MlfParams params, double z, int terms) {
    params.validate();
    require(terms >= 1, ErrorCode::InvalidArgument, "terms must be >= 1");
    if (!(z <= -kAsymptoticRadius)) {
        std::ostringstream os;
        os << "expansion requires z <= -" << kAsymptoticRadius << ", got " << z;
        fail(ErrorCode::RegionTooSmall, os.str());
    }
    CompensatedSum acc;
    double zk = 1.0;
    for (int k = 1; k <= terms; ++k) {
        zk /= z;
        acc.add(-zk * rgamma_expansion(params.beta - params.alpha * k));
    }
    return acc.value();
}

double mlf_recurrence_residual(MlfParams params, double z) {
    const double mu = params.beta;
    const double lhs = mlf_eval(params, z);
    const double shifted = mlf_eval({params.alpha, mu + params.alpha}, z);
    return lhs - rgamma(mu) - z * shifted;
}

}  // namespace fracmix
