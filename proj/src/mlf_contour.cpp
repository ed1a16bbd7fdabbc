// Inverse Laplace transform of s^{a-b} / (s^a - z) at t = 1, evaluated by the
// trapezoidal rule on a parabolic contour s(u) = mu (1 + i u)^2. The contour
// parameters (mu, h, N) are chosen per region between consecutive
// singularities so that discretization, truncation and round-off errors are
// balanced; poles left outside the contour are added back as residues.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "fracmix/mlf.hpp"

namespace fracmix::detail {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogEps = std::log(std::numeric_limits<double>::epsilon());

struct ContourParams {
    double mu = 0.0;
    double h = 0.0;
    double nodes = kInf;  // N, possibly infinite when the region is unusable
};

// Region bounded by two singularities with parabola parameters phi_j < phi_j1.
// pj, qj are the singularity strengths at either end.
ContourParams optimal_bounded(double t, double phi_j, double phi_j1, double pj, double qj,
                              double log_epsilon) {
    constexpr double fac = 1.01;
    const double f_max = std::exp(log_epsilon - kLogEps);

    const double sq_phi_j = std::sqrt(phi_j);
    const double threshold = 2.0 * std::sqrt((log_epsilon - kLogEps) / t);
    const double sq_phi_j1 = std::min(std::sqrt(phi_j1), threshold - sq_phi_j);

    double bar_j = 0.0;
    double bar_j1 = 0.0;
    double f_bar = 1.0;
    bool admissible = false;

    if (pj < 1.0e-14 && qj < 1.0e-14) {
        bar_j = sq_phi_j;
        bar_j1 = sq_phi_j1;
        admissible = true;
    } else if (pj < 1.0e-14) {
        bar_j = sq_phi_j;
        const double f_min =
            sq_phi_j > 0.0 ? fac * std::pow(sq_phi_j / (sq_phi_j1 - sq_phi_j), qj) : fac;
        if (f_min < f_max) {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            const double fq = std::pow(f_bar, -1.0 / qj);
            bar_j1 = (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq);
            admissible = true;
        }
    } else if (qj < 1.0e-14) {
        bar_j1 = sq_phi_j1;
        const double f_min = fac * std::pow(sq_phi_j1 / (sq_phi_j1 - sq_phi_j), pj);
        if (f_min < f_max) {
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            const double fp = std::pow(f_bar, -1.0 / pj);
            bar_j = (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp);
            admissible = true;
        }
    } else {
        double f_min =
            fac * (sq_phi_j + sq_phi_j1) / std::pow(sq_phi_j1 - sq_phi_j, std::max(pj, qj));
        if (f_min < f_max) {
            f_min = std::max(f_min, 1.5);
            f_bar = f_min + f_min / f_max * (f_max - f_min);
            const double fp = std::pow(f_bar, -1.0 / pj);
            const double fq = std::pow(f_bar, -1.0 / qj);
            const double w = -phi_j1 * t / log_epsilon;
            const double den = 2.0 + w - (1.0 + w) * fp + fq;
            bar_j = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den;
            bar_j1 = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den;
            admissible = true;
        }
    }

    ContourParams out;
    if (!admissible) return out;
    const double log_eps_adj = log_epsilon - std::log(f_bar);
    const double w = -bar_j1 * bar_j1 * t / log_eps_adj;
    const double mu = std::pow(((1.0 + w) * bar_j + bar_j1) / (2.0 + w), 2);
    const double h = -2.0 * kPi / log_eps_adj * (bar_j1 - bar_j) / ((1.0 + w) * bar_j + bar_j1);
    if (!(mu > 0.0) || !(h > 0.0)) return out;
    out.mu = mu;
    out.h = h;
    out.nodes = std::ceil(std::sqrt(1.0 - log_eps_adj / t / mu) / h);
    return out;
}

// Region to the right of the last singularity.
ContourParams optimal_unbounded(double t, double phi_j, double pj, double log_epsilon) {
    const double sq_phi_j = std::sqrt(phi_j);
    double phibar = phi_j > 0.0 ? phi_j * 1.01 : 0.01;
    double sq_phibar = std::sqrt(phibar);

    constexpr double f_min = 1.0;
    constexpr double f_max = 10.0;
    constexpr double f_tar = 5.0;

    double nodes = 0.0;
    double a_coef = 0.0;
    double sq_mu = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        const double phi_t = phibar * t;
        const double log_eps_phi_t = log_epsilon / phi_t;
        nodes = std::ceil(phi_t / kPi *
                          (1.0 - 3.0 * log_eps_phi_t / 2.0 + std::sqrt(1.0 - 2.0 * log_eps_phi_t)));
        a_coef = kPi * nodes / phi_t;
        sq_mu = sq_phibar * std::abs(4.0 - a_coef) / std::abs(7.0 - std::sqrt(1.0 + 12.0 * a_coef));
        const double fbar = std::pow((sq_phibar - sq_phi_j) / sq_mu, -pj);
        const bool stop = pj < 1.0e-14 || (f_min < fbar && fbar < f_max);
        if (stop) break;
        sq_phibar = std::pow(f_tar, -1.0 / pj) * sq_mu + sq_phi_j;
        phibar = sq_phibar * sq_phibar;
    }

    ContourParams out;
    out.mu = sq_mu * sq_mu;
    out.h = (-3.0 * a_coef - 2.0 + 2.0 * std::sqrt(1.0 + 12.0 * a_coef)) / (4.0 - a_coef) / nodes;
    out.nodes = nodes;

    // Keep e^{mu t} from amplifying round-off beyond the target tolerance.
    const double threshold = (log_epsilon - kLogEps) / t;
    if (out.mu > threshold) {
        const double q = std::abs(pj) < 1.0e-14 ? 0.0 : std::pow(f_tar, -1.0 / pj) * std::sqrt(out.mu);
        const double phibar_adj = std::pow(q + sq_phi_j, 2);
        if (phibar_adj < threshold) {
            const double w = std::sqrt(kLogEps / (kLogEps - log_epsilon));
            const double u = std::sqrt(-phibar_adj * t / kLogEps);
            out.mu = threshold;
            out.nodes = std::ceil(w * log_epsilon / 2.0 / kPi / (u * w - 1.0));
            out.h = w / out.nodes;
        } else {
            out.nodes = kInf;
            out.h = 0.0;
        }
    }
    if (!(out.h > 0.0) || !(out.nodes > 0.0)) out.nodes = kInf;
    return out;
}

}  // namespace

double mlf_contour(double alpha, double beta, double z) {
    if (z == 0.0) return rgamma(beta);
    constexpr double t = 1.0;
    double log_epsilon = std::log(1.0e-15);

    // Poles of s^{a-b}/(s^a - z) on the principal sheet: s^a = z.
    const double theta = z < 0.0 ? kPi : 0.0;
    const double radius = std::pow(std::abs(z), 1.0 / alpha);
    const int kmin = static_cast<int>(std::ceil(-alpha / 2.0 - theta / (2.0 * kPi)));
    const int kmax = static_cast<int>(std::floor(alpha / 2.0 - theta / (2.0 * kPi)));

    struct Singularity {
        cplx s;
        double phi;
    };
    std::vector<Singularity> poles;
    for (int k = kmin; k <= kmax; ++k) {
        const cplx s = std::polar(radius, (theta + 2.0 * kPi * k) / alpha);
        const double phi = (s.real() + std::abs(s)) / 2.0;
        if (phi > 1.0e-15) poles.push_back({s, phi});
    }
    std::sort(poles.begin(), poles.end(),
              [](const Singularity& a, const Singularity& b) { return a.phi < b.phi; });

    // Singularity list with the branch point at the origin first.
    std::vector<Singularity> sing;
    sing.push_back({cplx(0.0, 0.0), 0.0});
    sing.insert(sing.end(), poles.begin(), poles.end());
    const std::size_t n_sing = sing.size();

    std::vector<double> strength_left(n_sing, 1.0);
    std::vector<double> strength_right(n_sing, 1.0);
    strength_left[0] = std::max(0.0, -2.0 * (alpha - beta + 1.0));
    strength_right[n_sing - 1] = kInf;

    std::vector<double> phi(n_sing + 1);
    for (std::size_t j = 0; j < n_sing; ++j) phi[j] = sing[j].phi;
    phi[n_sing] = kInf;

    std::vector<std::size_t> admissible;
    for (std::size_t j = 0; j < n_sing; ++j) {
        if (phi[j] < (log_epsilon - kLogEps) / t && phi[j] < phi[j + 1]) admissible.push_back(j);
    }

    std::vector<ContourParams> params(n_sing);
    std::size_t best = 0;
    for (int relax = 0; relax < 12; ++relax) {
        for (std::size_t j : admissible) {
            params[j] = (j + 1 < n_sing)
                            ? optimal_bounded(t, phi[j], phi[j + 1], strength_left[j],
                                              strength_right[j], log_epsilon)
                            : optimal_unbounded(t, phi[j], strength_left[j], log_epsilon);
        }
        double min_nodes = kInf;
        for (std::size_t j : admissible) {
            if (params[j].nodes < min_nodes) {
                min_nodes = params[j].nodes;
                best = j;
            }
        }
        if (min_nodes <= 200.0) break;
        log_epsilon += std::log(10.0);
    }

    const ContourParams& cp = params[best];
    if (!std::isfinite(cp.nodes)) return std::numeric_limits<double>::quiet_NaN();
    const int n_nodes = static_cast<int>(cp.nodes);

    // Trapezoidal rule; for real z the samples at +-u are related by
    // S(-u) = -conj(S(u)), so only Im S over u >= 0 is needed.
    auto sample = [&](double u) {
        const cplx w(1.0, u);
        const cplx s = cp.mu * w * w;
        const cplx ds = 2.0 * cp.mu * cplx(-u, 1.0);
        const cplx f = std::pow(s, alpha - beta) / (std::pow(s, alpha) - z) * ds;
        return (std::exp(s * t) * f).imag();
    };
    double acc = sample(0.0);
    for (int k = 1; k <= n_nodes; ++k) acc += 2.0 * sample(cp.h * k);
    double value = cp.h * acc / (2.0 * kPi);

    // Poles to the right of the chosen contour.
    cplx residues(0.0, 0.0);
    for (std::size_t j = best + 1; j < n_sing; ++j) {
        const cplx s = sing[j].s;
        residues += std::pow(s, 1.0 - beta) * std::exp(s * t) / alpha;
    }
    value += residues.real();
    return value;
}

}  // namespace fracmix::detail
