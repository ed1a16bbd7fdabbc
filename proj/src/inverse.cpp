#include "fracmix/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "fracmix/errors.hpp"
#include "fracmix/log.hpp"
#include "fracmix/mlf.hpp"
#include "fracmix/parallel.hpp"

namespace fracmix {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCatalogTol = 1.0e-8;
constexpr double kNullTol = 1.0e-6;

double decay_q(double alpha, double lambda, double q) {
    return mlf_eval({alpha, 1.0}, -lambda * std::pow(q, alpha));
}

std::size_t resolve_modes(const EigenSystem& sys, std::size_t n_modes) {
    if (n_modes == 0) return sys.n_modes();
    require(n_modes <= sys.n_modes(), ErrorCode::ResolutionTooLow,
            "requested more modes than the eigensystem holds");
    return n_modes;
}

// 0/0 test: the data difference is zero up to rounding of the projections.
bool difference_vanishes(double phi_k, double psi_k) {
    return std::abs(phi_k - psi_k) <= 8.0 * std::numeric_limits<double>::epsilon() *
                                          (std::abs(phi_k) + std::abs(psi_k));
}

struct ModeData {
    double f = 0.0;
    double V0 = 0.0;
};

// f_k and V_k(0) from the two measurements. With c = (phi_k - psi_k) / delta,
// V(t) = f/lambda + c E_{a,1}(-lambda t^a) and the t < 0 branch equals
// psi_k at t = -p exactly when c satisfies this quotient.
ModeData solve_mode(double lambda, double phi_k, double psi_k, double e_q, double delta, bool zero_quotient) {
    const double c = zero_quotient ? 0.0 : (phi_k - psi_k) / delta;
    ModeData m;
    m.f = lambda * phi_k - lambda * c * e_q;
    m.V0 = phi_k + c * (1.0 - e_q);
    return m;
}

std::string mode_list(const std::vector<int>& ks) {
    std::ostringstream os;
    for (std::size_t i = 0; i < ks.size(); ++i) os << (i ? ", " : "") << ks[i];
    return os.str();
}

}  // namespace

double delta_problem1(double alpha, double lambda, double p, double q) {
    const double s = std::sqrt(lambda);
    return decay_q(alpha, lambda, q) - s * std::sin(s * p) - std::cos(s * p);
}

double delta_problem1_phase(double alpha, double lambda, double p, double q) {
    const double s = std::sqrt(lambda);
    const double gamma = std::asin(1.0 / std::sqrt(lambda + 1.0));
    return decay_q(alpha, lambda, q) - std::sqrt(lambda + 1.0) * std::sin(s * p + gamma);
}

double fractional_bracket(double beta, double lambda, double p) {
    const double z = -lambda * std::pow(p, beta);
    return mlf_eval({beta, 1.0}, z) + lambda * p * mlf_eval({beta, 2.0}, z);
}

double delta_problem2(double alpha, double beta, double lambda, double p, double q) {
    return decay_q(alpha, lambda, q) - fractional_bracket(beta, lambda, p);
}

double mode_delta(double alpha, double beta, double lambda, double p, double q) {
    return beta == 2.0 ? delta_problem1(alpha, lambda, p, q) : delta_problem2(alpha, beta, lambda, p, q);
}

DeltaDiagnostics diagnose(const EigenSystem& sys, double alpha, double beta, double p, double q,
                          std::size_t n_modes, double delta_floor, double delta_warn) {
    const std::size_t n = resolve_modes(sys, n_modes);
    DeltaDiagnostics d;
    d.lambda.assign(sys.lambda.begin(), sys.lambda.begin() + static_cast<std::ptrdiff_t>(n));
    d.delta.resize(n);
    parallel_for(n, [&](std::size_t k) { d.delta[k] = mode_delta(alpha, beta, d.lambda[k], p, q); });
    d.min_abs_delta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double a = std::abs(d.delta[k]);
        if (a < d.min_abs_delta) {
            d.min_abs_delta = a;
            d.argmin = static_cast<int>(k) + 1;
        }
        if (a < delta_floor) d.flagged.push_back(static_cast<int>(k) + 1);
        else if (a < delta_warn) d.warned.push_back(static_cast<int>(k) + 1);
    }
    return d;
}

std::vector<double> reconstruct_coeffs(std::span<const double> lambda, std::span<const double> phi,
                                       std::span<const double> psi, double alpha, double beta, double p,
                                       double q, double delta_floor) {
    require(phi.size() == psi.size() && phi.size() <= lambda.size(), ErrorCode::GridMismatch,
            "coefficient vectors differ in length");
    std::vector<double> f(phi.size());
    std::vector<int> bad;
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const double delta = mode_delta(alpha, beta, lambda[k], p, q);
        bool zero = false;
        if (std::abs(delta) < delta_floor) {
            if (!difference_vanishes(phi[k], psi[k])) {
                bad.push_back(static_cast<int>(k) + 1);
                continue;
            }
            zero = true;
        }
        f[k] = solve_mode(lambda[k], phi[k], psi[k], decay_q(alpha, lambda[k], q), delta, zero).f;
    }
    if (!bad.empty()) {
        throw IllPosedModeError(bad, "IllPosedMode: |delta_k| below floor for modes " + mode_list(bad));
    }
    return f;
}

ReconstructionReport reconstruct(const EigenSystem& sys, const ProblemSpec& spec,
                                 const ReconstructOptions& opts) {
    spec.validate();
    require(spec.phi.size() == sys.grid.n && spec.psi.size() == sys.grid.n, ErrorCode::GridMismatch,
            "phi and psi must be sampled on the eigen grid");
    require(opts.delta_floor > 0.0, ErrorCode::InvalidArgument, "delta_floor must be positive");
    const std::size_t n = resolve_modes(sys, opts.n_modes);
    const double alpha = spec.alpha, beta = spec.beta, p = spec.p, q = spec.q;

    ReconstructionReport r;
    r.phi_coeffs = project(sys, spec.phi, n);
    r.psi_coeffs = project(sys, spec.psi, n);
    r.deltas = diagnose(sys, alpha, beta, p, q, n, opts.delta_floor, opts.delta_warn);

    std::vector<int> bad;
    for (int k : r.deltas.flagged) {
        const auto i = static_cast<std::size_t>(k - 1);
        if (difference_vanishes(r.phi_coeffs[i], r.psi_coeffs[i])) {
            r.zero_over_zero.push_back(k);
            log().info("mode {}: delta = {:.3e} with vanishing data difference, quotient set to 0", k,
                       r.deltas.delta[i]);
        } else {
            bad.push_back(k);
        }
    }
    if (!bad.empty()) {
        std::ostringstream os;
        os << "IllPosedMode: |delta_k| < " << opts.delta_floor << " for modes " << mode_list(bad);
        throw IllPosedModeError(bad, os.str());
    }
    for (int k : r.deltas.warned) {
        log().warn("mode {}: |delta| = {:.3e} below the warn threshold {:.1e}", k,
                   std::abs(r.deltas.delta[static_cast<std::size_t>(k - 1)]), opts.delta_warn);
    }

    r.f_coeffs.resize(n);
    r.modes.resize(n);
    parallel_for(n, [&](std::size_t i) {
        const double lambda = sys.lambda[i];
        const bool zero = std::find(r.zero_over_zero.begin(), r.zero_over_zero.end(),
                                    static_cast<int>(i) + 1) != r.zero_over_zero.end();
        const ModeData md = solve_mode(lambda, r.phi_coeffs[i], r.psi_coeffs[i], decay_q(alpha, lambda, q),
                                       r.deltas.delta[i], zero);
        r.f_coeffs[i] = md.f;
        r.modes[i] = make_mode(static_cast<int>(i) + 1, beta, lambda, md.f, md.V0);
        r.modes[i].delta = r.deltas.delta[i];
    });
    r.f = synthesize(sys, r.f_coeffs);

    auto misfit = [&](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
        return l2_norm(sys.weights, d);
    };
    r.residual_q = misfit(field_at(sys, r.modes, alpha, beta, q), spec.phi);
    r.residual_p = misfit(field_at(sys, r.modes, alpha, beta, -p), spec.psi);
    r.truncation_q = misfit(synthesize(sys, r.phi_coeffs), spec.phi);
    r.truncation_p = misfit(synthesize(sys, r.psi_coeffs), spec.psi);
    r.gluing = gluing_residual(r.modes, alpha, beta, p, q, opts.t_min);
    r.tail_estimate = truncation_tail_estimate(r.f_coeffs, r.deltas.lambda);
    if (opts.assemble) {
        const auto t = make_time_grid(p, q, opts.n_t_neg, opts.n_t_pos);
        r.u_field = assemble_field(sys, r.modes, alpha, beta, t);
    }
    return r;
}

Json report_to_json(const ReconstructionReport& r, const ProblemSpec& spec, const ReconstructOptions& opts) {
    Json doc;
    doc["status"] = "ok";
    doc["problem"] = {{"alpha", spec.alpha}, {"beta", spec.beta}, {"p", spec.p}, {"q", spec.q},
                      {"branch", spec.is_wave() ? "wave" : "fractional"}};
    doc["numerics"] = {{"n_modes", r.f_coeffs.size()},
                       {"delta_floor", opts.delta_floor},
                       {"delta_warn", opts.delta_warn},
                       {"t_min", opts.t_min}};
    doc["min_abs_delta"] = r.deltas.min_abs_delta;
    doc["argmin_mode"] = r.deltas.argmin;
    doc["flagged_modes"] = r.deltas.flagged;
    doc["warned_modes"] = r.deltas.warned;
    doc["zero_over_zero_modes"] = r.zero_over_zero;
    doc["residuals"] = {{"u_q_minus_phi", r.residual_q},
                        {"u_p_minus_psi", r.residual_p},
                        {"truncation_phi", r.truncation_q},
                        {"truncation_psi", r.truncation_p},
                        {"gluing_at_t_min", r.gluing}};
    doc["tail_estimate"] = r.tail_estimate;
    Json modes = Json::array();
    for (std::size_t i = 0; i < r.modes.size(); ++i) {
        const auto& m = r.modes[i];
        Json jm;
        jm["k"] = m.k;
        jm["lambda"] = m.lambda;
        jm["delta"] = m.delta;
        jm["phi_k"] = r.phi_coeffs[i];
        jm["psi_k"] = r.psi_coeffs[i];
        jm["f_k"] = m.f;
        jm["V0"] = m.V0;
        if (spec.is_wave()) {
            jm["A"] = m.A;
            jm["B"] = m.B;
        } else {
            jm["W0"] = m.W0;
            jm["W0prime"] = m.W0prime;
        }
        modes.push_back(std::move(jm));
    }
    doc["modes"] = std::move(modes);
    return doc;
}

IllposednessCatalog illposed_p_catalog(const EigenSystem& sys, double alpha, double q, int k_max, int n_max) {
    require(k_max >= 1 && n_max >= 1, ErrorCode::InvalidArgument, "k_max and n_max must be >= 1");
    require(static_cast<std::size_t>(k_max) <= sys.n_modes(), ErrorCode::ResolutionTooLow,
            "k_max exceeds the resolved modes");
    IllposednessCatalog cat;
    for (int k = 1; k <= k_max; ++k) {
        const double lambda = sys.lambda[static_cast<std::size_t>(k - 1)];
        const double s = std::sqrt(lambda);
        const double amp = std::sqrt(lambda + 1.0);
        const double gamma = std::asin(1.0 / amp);
        const double e_q = decay_q(alpha, lambda, q);
        const double phase = std::asin(e_q / amp);
        cat.gamma.push_back(gamma);
        for (int n = 1; n <= n_max; ++n) {
            for (int b = 0; b < 2; ++b) {
                double p = b == 0 ? (phase - gamma + 2.0 * n * kPi) / s
                                  : (-phase - gamma + (2.0 * n + 1.0) * kPi) / s;
                // One Newton step on E - amp sin(s p + gamma).
                const double arg = s * p + gamma;
                const double dd = -amp * s * std::cos(arg);
                const double res = e_q - amp * std::sin(arg);
                if (dd != 0.0) p -= res / dd;
                const double delta = delta_problem1(alpha, lambda, p, q);
                if (!(p > 0.0) || std::abs(delta) > kCatalogTol) {
                    log().warn("catalog root k={}, n={} rejected: p = {}, delta = {:.3e}", k, n, p, delta);
                    continue;
                }
                cat.entries.push_back({k, n, b == 0 ? "arcsin" : "pi-minus", p, delta});
            }
        }
    }
    std::stable_sort(cat.entries.begin(), cat.entries.end(),
                     [](const CatalogEntry& a, const CatalogEntry& b) { return a.p < b.p; });
    return cat;
}

CsvTable catalog_to_csv(const IllposednessCatalog& cat) {
    CsvTable t;
    t.header = {"k", "n", "branch", "p", "delta", "gamma_k"};
    t.columns.assign(6, {});
    t.text.assign(6, {});
    for (const auto& e : cat.entries) {
        t.columns[0].push_back(e.k);
        t.columns[1].push_back(e.n);
        t.columns[2].push_back(0.0);
        t.text[2].push_back(e.branch);
        t.columns[3].push_back(e.p);
        t.columns[4].push_back(e.delta);
        t.columns[5].push_back(cat.gamma[static_cast<std::size_t>(e.k - 1)]);
    }
    return t;
}

NullSolution null_solution(const EigenSystem& sys, double alpha, double q, int k, double p,
                           std::size_t n_t_neg, std::size_t n_t_pos) {
    require(k >= 1 && static_cast<std::size_t>(k) <= sys.n_modes(), ErrorCode::InvalidArgument,
            "mode index out of range");
    const auto idx = static_cast<std::size_t>(k - 1);
    const double lambda = sys.lambda[idx];
    NullSolution ns;
    ns.delta = delta_problem1(alpha, lambda, p, q);
    if (std::abs(ns.delta) > kNullTol) {
        std::ostringstream os;
        os << "|delta_" << k << "(" << p << ")| = " << std::abs(ns.delta) << " exceeds " << kNullTol;
        fail(ErrorCode::NotIllPosed, os.str());
    }
    const double z = -lambda * std::pow(q, alpha);
    const double f = -mlf_eval({alpha, 1.0}, z) / (std::pow(q, alpha) * mlf_eval({alpha, alpha + 1.0}, z));
    ns.mode = make_mode(k, 2.0, lambda, f, 1.0);
    ns.mode.delta = ns.delta;

    std::vector<ModeSolution> modes(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < modes.size(); ++i) modes[i] = make_mode(static_cast<int>(i) + 1, 2.0, sys.lambda[i], 0.0, 0.0);
    modes[idx] = ns.mode;

    ns.field = assemble_field(sys, modes, alpha, 2.0, make_time_grid(p, q, n_t_neg, n_t_pos));
    ns.f.resize(sys.grid.n);
    for (std::size_t i = 0; i < ns.f.size(); ++i) ns.f[i] = f * sys.modes[idx][i];
    ns.trace_q = l2_norm(sys.weights, field_at(sys, modes, alpha, 2.0, q));
    ns.trace_p = l2_norm(sys.weights, field_at(sys, modes, alpha, 2.0, -p));
    ns.norm_u0 = l2_norm(sys.weights, field_at(sys, modes, alpha, 2.0, 0.0));
    ns.norm_f = l2_norm(sys.weights, ns.f);
    return ns;
}

RationalProbe rational_p_probe(const EigenSystem& sys, double alpha, double q, int m, int n, int k_max) {
    require(m >= 1 && n >= 1, ErrorCode::InvalidArgument, "p = m / n needs positive m, n");
    require(k_max >= 2 && static_cast<std::size_t>(k_max) <= sys.n_modes(), ErrorCode::ResolutionTooLow,
            "k range exceeds the resolved modes");
    RationalProbe r;
    const int g = std::gcd(m, n);
    r.m = m / g;
    r.n = n / g;
    const double p = static_cast<double>(r.m) / static_cast<double>(r.n);
    r.abs_delta.resize(static_cast<std::size_t>(k_max));
    parallel_for(r.abs_delta.size(), [&](std::size_t i) {
        r.abs_delta[i] = std::abs(delta_problem1(alpha, sys.lambda[i], p, q));
    });
    const auto it = std::min_element(r.abs_delta.begin(), r.abs_delta.end());
    r.min_abs_delta = *it;
    r.argmin = static_cast<int>(it - r.abs_delta.begin()) + 1;
    const auto half = r.abs_delta.begin() + k_max / 2;
    r.delta_hat = *std::min_element(half, r.abs_delta.end());
    // Burn-in: first k after which every |delta_j| stays above delta_hat / 2.
    r.burn_in = k_max;
    for (int k = k_max; k >= 1; --k) {
        if (r.abs_delta[static_cast<std::size_t>(k - 1)] < r.delta_hat / 2.0) break;
        r.burn_in = k;
    }
    r.holds = r.delta_hat > 0.0;
    return r;
}

LargeQProbe large_q_probe(const EigenSystem& sys, double alpha, double beta, double p,
                          std::span<const double> q_ladder, std::size_t n_modes) {
    require(beta > 1.0 && beta < 2.0, ErrorCode::InvalidOrder, "large-q probe needs 1 < beta < 2");
    const std::size_t n = resolve_modes(sys, n_modes);
    LargeQProbe r;
    r.p = p;
    r.q_ladder.assign(q_ladder.begin(), q_ladder.end());
    r.bracket.resize(n);
    parallel_for(n, [&](std::size_t k) { r.bracket[k] = fractional_bracket(beta, sys.lambda[k], p); });
    r.c_hat = std::numeric_limits<double>::infinity();
    for (double b : r.bracket) r.c_hat = std::min(r.c_hat, std::abs(b));
    r.bracket_limit = 1.0 / (std::pow(p, beta - 1.0) * std::tgamma(2.0 - beta));
    r.bracket_last_rel = std::abs(r.bracket.back() / r.bracket_limit - 1.0);

    r.q0 = std::numeric_limits<double>::quiet_NaN();
    r.holds = true;
    bool reached = false;
    for (double q : r.q_ladder) {
        double mn = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            mn = std::min(mn, std::abs(decay_q(alpha, sys.lambda[k], q) - r.bracket[k]));
        }
        const double decay = decay_q(alpha, sys.lambda[0], q);
        r.min_abs_delta.push_back(mn);
        r.first_mode_decay.push_back(decay);
        if (!reached && decay < r.c_hat / 2.0) {
            reached = true;
            r.q0 = q;
        }
        if (reached && mn < r.c_hat / 2.0) r.holds = false;
    }
    if (!reached) r.holds = false;
    return r;
}

StabilityProbe stability_probe(const EigenSystem& sys, const ProblemSpec& spec, double noise_level,
                               int n_trials, std::uint64_t seed, std::size_t n_modes, double delta_floor) {
    spec.validate();
    require(n_trials >= 1, ErrorCode::InvalidArgument, "n_trials must be >= 1");
    require(noise_level >= 0.0, ErrorCode::InvalidArgument, "noise level must be non-negative");
    const std::size_t n = resolve_modes(sys, n_modes);
    const std::span<const double> lambda(sys.lambda.data(), n);

    std::vector<double> phi0(n, 0.0), psi0(n, 0.0);
    if (!spec.phi.empty()) phi0 = project(sys, spec.phi, n);
    if (!spec.psi.empty()) psi0 = project(sys, spec.psi, n);
    const auto f0 = reconstruct_coeffs(lambda, phi0, psi0, spec.alpha, spec.beta, spec.p, spec.q, delta_floor);

    StabilityProbe r;
    r.noise_level = noise_level;
    // Per-mode gains of the (linear) reconstruction map.
    for (std::size_t k = 0; k < n; ++k) {
        const double e_q = decay_q(spec.alpha, lambda[k], spec.q);
        const double delta = mode_delta(spec.alpha, spec.beta, lambda[k], spec.p, spec.q);
        const double g_phi = lambda[k] * (1.0 - e_q / delta);
        const double g_psi = lambda[k] * e_q / delta;
        r.lipschitz_bound = std::max(r.lipschitz_bound, std::max(std::abs(g_phi), std::abs(g_psi)) / lambda[k]);
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto h_norm = [&](const std::vector<double>& c) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += lambda[k] * lambda[k] * c[k] * c[k];
        return std::sqrt(s);
    };
    for (int t = 0; t < n_trials; ++t) {
        std::vector<double> dphi(n), dpsi(n), phi(n), psi(n);
        for (std::size_t k = 0; k < n; ++k) dphi[k] = noise_level * normal(rng) / (lambda[k] * lambda[k]);
        for (std::size_t k = 0; k < n; ++k) dpsi[k] = noise_level * normal(rng) / (lambda[k] * lambda[k]);
        for (std::size_t k = 0; k < n; ++k) {
            phi[k] = phi0[k] + dphi[k];
            psi[k] = psi0[k] + dpsi[k];
        }
        const auto f = reconstruct_coeffs(lambda, phi, psi, spec.alpha, spec.beta, spec.p, spec.q, delta_floor);
        double df = 0.0;
        for (std::size_t k = 0; k < n; ++k) df += (f[k] - f0[k]) * (f[k] - f0[k]);
        const double denom = h_norm(dphi) + h_norm(dpsi);
        r.ratios.push_back(denom > 0.0 ? std::sqrt(df) / denom : 0.0);
    }
    r.min_ratio = *std::min_element(r.ratios.begin(), r.ratios.end());
    r.max_ratio = *std::max_element(r.ratios.begin(), r.ratios.end());
    r.mean_ratio = std::accumulate(r.ratios.begin(), r.ratios.end(), 0.0) / static_cast<double>(r.ratios.size());
    return r;
}

Json probe_to_json(const RationalProbe& r) {
    Json doc;
    doc["probe"] = "rational_p";
    doc["p"] = {{"m", r.m}, {"n", r.n}};
    doc["k_max"] = r.abs_delta.size();
    doc["min_abs_delta"] = r.min_abs_delta;
    doc["argmin_mode"] = r.argmin;
    doc["delta_hat"] = r.delta_hat;
    doc["burn_in"] = r.burn_in;
    doc["holds"] = r.holds;
    doc["abs_delta"] = r.abs_delta;
    return doc;
}

Json probe_to_json(const LargeQProbe& r) {
    Json doc;
    doc["probe"] = "large_q";
    doc["p"] = r.p;
    doc["q_ladder"] = r.q_ladder;
    doc["min_abs_delta"] = r.min_abs_delta;
    doc["first_mode_decay"] = r.first_mode_decay;
    doc["c_hat"] = r.c_hat;
    doc["bracket_limit"] = r.bracket_limit;
    doc["bracket_last"] = r.bracket.empty() ? 0.0 : r.bracket.back();
    doc["bracket_last_rel_error"] = r.bracket_last_rel;
    doc["q0"] = r.q0;
    doc["holds"] = r.holds;
    doc["bracket"] = r.bracket;
    return doc;
}

Json probe_to_json(const StabilityProbe& r) {
    Json doc;
    doc["probe"] = "stability";
    doc["noise_level"] = r.noise_level;
    doc["n_trials"] = r.ratios.size();
    doc["min_ratio"] = r.min_ratio;
    doc["max_ratio"] = r.max_ratio;
    doc["mean_ratio"] = r.mean_ratio;
    doc["lipschitz_bound"] = r.lipschitz_bound;
    doc["ratios"] = r.ratios;
    return doc;
}

}  // namespace fracmix
