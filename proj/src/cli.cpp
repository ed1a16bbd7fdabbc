#include "fracmix/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fracmix/errors.hpp"
#include "fracmix/forward.hpp"
#include "fracmix/interp.hpp"
#include "fracmix/inverse.hpp"
#include "fracmix/liouville.hpp"
#include "fracmix/log.hpp"
#include "fracmix/mlf.hpp"
#include "fracmix/parallel.hpp"
#include "fracmix/spectral.hpp"

namespace fracmix {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

const std::set<std::string> kCommands = {"eigs",  "forward", "invert",    "diagnose",
                                         "catalog", "probe", "roundtrip", "mlf-table"};

[[noreturn]] void bad_config(const std::string& what) { fail(ErrorCode::InputError, "config: " + what); }

double num(const Json& j, const char* key, double def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number()) bad_config(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
}

std::size_t count(const Json& j, const char* key, std::size_t def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_number_integer() || j[key].get<long long>() < 0) {
        bad_config(std::string("'") + key + "' must be a non-negative integer");
    }
    return j[key].get<std::size_t>();
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) bad_config(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) bad_config("unknown key '" + it.key() + "' in " + where);
    }
}

std::vector<double> parse_list(const std::string& body) {
    std::vector<double> out;
    std::stringstream ss(body);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            bad_config("bad number '" + cell + "'");
        }
    }
    return out;
}

double parse_number(const std::string& s) {
    const auto v = parse_list(s);
    if (v.size() != 1) bad_config("expected one number in '" + s + "'");
    return v[0];
}

// ---- closed-form and sampled functions ------------------------------------

struct Fn {
    RealFn f;
    RealFn d1;  // empty when unknown
    RealFn d2;
};

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

Fn csv_function(const fs::path& path, const std::string& column) {
    const CsvTable t = read_csv_file(path);
    if (t.header.size() < 2) fail(ErrorCode::InputError, path.string() + ": need columns x and value");
    const auto& x = t.column(t.header[0]);
    const auto& v = column.empty() ? t.columns[1] : t.column(column);
    if (x.size() < 5) fail(ErrorCode::InputError, path.string() + ": need at least five rows");
    const UniformGrid grid(x.front(), x.back(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - grid[i]) > 1e-9 * std::max(1.0, std::abs(grid.b - grid.a))) {
            fail(ErrorCode::InputError, path.string() + ": x column must be uniformly spaced");
        }
    }
    auto s = std::make_shared<UniformSpline>(grid, v);
    return {[s](double xx) { return (*s)(xx); }, {}, {}};
}

// String presets, as functions of x on [a, b].
Fn preset_function(const std::string& name, double a, double b) {
    const double L = b - a;
    if (name == "zero") {
        auto z = [](double) { return 0.0; };
        return {z, z, z};
    }
    if (name == "x(1-x)") {
        return {[=](double x) {
                    const double s = (x - a) / L;
                    return s * (1.0 - s);
                },
                {}, {}};
    }
    if (name.rfind("sin:", 0) == 0) {
        const double k = parse_number(name.substr(4));
        return {[=](double x) { return std::numbers::sqrt2 * sin_pi(k * (x - a) / L); }, {}, {}};
    }
    if (name.rfind("const:", 0) == 0) {
        const double c = parse_number(name.substr(6));
        return {[=](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
    }
    if (name.rfind("poly:", 0) == 0) {
        const auto c = parse_list(name.substr(5));
        if (c.empty()) bad_config("poly: needs coefficients");
        auto horner = [c](double x, int deriv) {
            double acc = 0.0;
            for (int i = static_cast<int>(c.size()) - 1; i >= deriv; --i) {
                double fac = 1.0;
                for (int j = 0; j < deriv; ++j) fac *= i - j;
                acc = acc * x + fac * c[static_cast<std::size_t>(i)];
            }
            return acc;
        };
        return {[=](double x) { return horner(x, 0); }, [=](double x) { return horner(x, 1); },
                [=](double x) { return horner(x, 2); }};
    }
    bad_config("unknown function preset '" + name + "'");
}

// ---- operator -------------------------------------------------------------

struct Pipeline {
    LiouvilleMap map;
    EigenSystem sys;      // normal-form eigenpairs on [0, 1]
    EigenSystem problem;  // same modes, eigenvalues of the original operator (lambda / K^2)
    bool identity = true;
};

Json normalize_operator(const Json& op) {
    if (op.is_string()) return Json{{"preset", op.get<std::string>()}};
    if (!op.is_object()) bad_config("operator must be a string or an object");
    check_keys(op, {"preset", "g", "g_csv", "a", "b", "r", "e"}, "operator");
    return op;
}

Pipeline build_pipeline(const RunConfig& cfg) {
    const Json& op = cfg.operator_spec;
    Pipeline pl;
    const std::size_t n = cfg.n_grid;
    const std::size_t m = cfg.n_modes;
    std::optional<double> constant;
    std::optional<std::vector<double>> g_samples;
    OperatorSpec spec = OperatorSpec::identity();

    if (op.contains("preset")) {
        const std::string name = op["preset"].get<std::string>();
        if (name == "zero-potential") {
            constant = 0.0;
        } else if (name.rfind("constant:", 0) == 0) {
            constant = parse_number(name.substr(9));
        } else if (name == "quadratic-r") {
            // r = (1 + x)^2, e = 0 on [0, 1]: g = K^2 / 4 with K = ln 2.
            const Fn r = preset_function("poly:1,2,1", 0.0, 1.0);
            spec.r = r.f;
            spec.dr = r.d1;
            spec.d2r = r.d2;
            spec.e = [](double) { return 0.0; };
            pl.identity = false;
        } else {
            bad_config("unknown operator preset '" + name + "'");
        }
    } else if (op.contains("g") || op.contains("g_csv")) {
        std::vector<double> vals;
        if (op.contains("g")) {
            vals = op["g"].get<std::vector<double>>();
        } else {
            const Fn f = csv_function(resolve(cfg.base_dir, op["g_csv"].get<std::string>()), "");
            const UniformGrid grid(0.0, 1.0, n);
            vals.resize(n);
            for (std::size_t i = 0; i < n; ++i) vals[i] = f.f(grid[i]);
        }
        if (vals.size() != n) {
            if (vals.size() < 5) bad_config("operator.g needs at least five samples");
            const UniformSpline s(UniformGrid(0.0, 1.0, vals.size()), vals);
            const UniformGrid grid(0.0, 1.0, n);
            std::vector<double> res(n);
            for (std::size_t i = 0; i < n; ++i) res[i] = s(grid[i]);
            vals = std::move(res);
        }
        g_samples = std::move(vals);
    } else if (op.contains("r")) {
        spec.a = num(op, "a", 0.0);
        spec.b = num(op, "b", 1.0);
        auto fn_of = [&](const char* key) -> Fn {
            if (!op.contains(key)) return preset_function("zero", spec.a, spec.b);
            const Json& j = op[key];
            if (j.is_string()) return preset_function(j.get<std::string>(), spec.a, spec.b);
            if (j.is_object() && j.contains("csv")) {
                return csv_function(resolve(cfg.base_dir, j["csv"].get<std::string>()),
                                    j.value("column", std::string()));
            }
            bad_config(std::string("operator.") + key + " must be a preset string or {\"csv\": path}");
        };
        const Fn r = fn_of("r");
        const Fn e = fn_of("e");
        spec.r = r.f;
        spec.dr = r.d1;
        spec.d2r = r.d2;
        spec.e = e.f;
        pl.identity = false;
    } else {
        bad_config("operator needs one of preset, g, g_csv, r");
    }

    pl.map = build_map(spec, n);
    const bool analytic = constant.has_value() && cfg.eigensolver == "auto";
    if (analytic) {
        pl.sys = constant_potential_system(*constant, m, n);
    } else if (constant) {
        pl.sys = solve_eigensystem([c = *constant](double) { return c; }, m, n);
    } else if (g_samples) {
        pl.sys = solve_eigensystem(*g_samples, m, n);
    } else {
        pl.sys = solve_eigensystem(pl.map.g, m, n);
    }
    pl.problem = pl.sys;
    for (double& l : pl.problem.lambda) l = eigenvalue_pullback(pl.map, l);
    return pl;
}

// ---- data fields ------------------------------------------------------------

// Resolves a data spec to samples on the normal-form grid.
std::vector<double> data_samples(const Json& spec, const Pipeline& pl, const fs::path& base) {
    const double a = pl.map.x_grid.a, b = pl.map.x_grid.b;
    double scale = 1.0;
    const Json* body = &spec;
    if (spec.is_object() && spec.contains("preset")) {
        check_keys(spec, {"preset", "scale"}, "data entry");
        scale = num(spec, "scale", 1.0);
        body = &spec["preset"];
    }
    std::vector<double> out;
    if (body->is_string()) {
        out = push_function(pl.map, preset_function(body->get<std::string>(), a, b).f);
    } else if (body->is_object() && body->contains("csv")) {
        check_keys(*body, {"csv", "column", "scale"}, "data entry");
        scale = num(*body, "scale", 1.0);
        const Fn f = csv_function(resolve(base, (*body)["csv"].get<std::string>()),
                                  body->value("column", std::string()));
        out = push_function(pl.map, f.f);
    } else if (body->is_object() && body->contains("modes")) {
        check_keys(*body, {"modes", "scale"}, "data entry");
        scale = num(*body, "scale", 1.0);
        const auto c = (*body)["modes"].get<std::vector<double>>();
        if (c.size() > pl.sys.n_modes()) bad_config("data modes exceed n_modes");
        out = synthesize(pl.sys, c);
    } else {
        bad_config("data entry must be a preset string, {\"preset\"}, {\"csv\"} or {\"modes\"}");
    }
    for (double& v : out) v *= scale;
    return out;
}

CsvTable x_samples_csv(const Pipeline& pl, const std::vector<double>& zbar, const char* name) {
    CsvTable t;
    t.header = {"x", name};
    t.columns = {pl.map.x_grid.points(), pull_function(pl.map, zbar)};
    return t;
}

CsvTable field_csv(const Pipeline& pl, const SolutionField& field, std::size_t stride) {
    SolutionField out;
    const auto xs = pl.map.x_grid.points();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < xs.size(); i += std::max<std::size_t>(1, stride)) idx.push_back(i);
    if (idx.back() != xs.size() - 1) idx.push_back(xs.size() - 1);
    for (std::size_t i : idx) out.grid_x.push_back(xs[i]);
    out.grid_t = field.grid_t;
    for (const auto& row : field.u) {
        const auto x_row = pull_function(pl.map, row);
        std::vector<double> r;
        for (std::size_t i : idx) r.push_back(x_row[i]);
        out.u.push_back(std::move(r));
    }
    return field_to_csv(out);
}

ProblemSpec problem_of(const RunConfig& cfg) {
    ProblemSpec s;
    s.alpha = cfg.alpha;
    s.beta = cfg.beta;
    s.p = cfg.p;
    s.q = cfg.q;
    return s;
}

ReconstructOptions options_of(const RunConfig& cfg) {
    ReconstructOptions o;
    o.delta_floor = cfg.delta_floor;
    o.delta_warn = cfg.delta_warn;
    o.t_min = cfg.t_min;
    o.n_t_neg = cfg.n_t_neg;
    o.n_t_pos = cfg.n_t_pos;
    return o;
}

Json problem_json(const RunConfig& cfg) {
    return {{"alpha", cfg.alpha}, {"beta", cfg.beta}, {"p", cfg.p}, {"q", cfg.q}};
}

// ---- commands -----------------------------------------------------------------

int cmd_eigs(const RunConfig& cfg, std::ostream& out) {
    const Pipeline pl = build_pipeline(cfg);
    write_json_file(cfg.output_dir / "eigensystem.json", eigensystem_to_json(pl.sys));
    CsvTable t;
    t.header = {"k", "lambda", "mu"};
    t.columns.assign(3, {});
    for (std::size_t k = 0; k < pl.sys.n_modes(); ++k) {
        t.columns[0].push_back(static_cast<double>(k + 1));
        t.columns[1].push_back(pl.sys.lambda[k]);
        t.columns[2].push_back(pl.problem.lambda[k]);
    }
    write_csv_file(cfg.output_dir / "eigenvalues.csv", t);
    out << "K = " << format_double(pl.map.K) << "\n";
    for (std::size_t k = 0; k < std::min<std::size_t>(5, pl.sys.n_modes()); ++k) {
        out << "lambda_" << k + 1 << " = " << format_double(pl.sys.lambda[k]) << "\n";
    }
    return 0;
}

void write_ill_posed(const RunConfig& cfg, const Pipeline& pl, const IllPosedModeError& ex,
                     std::ostream& err) {
    const auto d = diagnose(pl.problem, cfg.alpha, cfg.beta, cfg.p, cfg.q, 0, cfg.delta_floor, cfg.delta_warn);
    Json doc;
    doc["status"] = "ill-posed";
    doc["problem"] = problem_json(cfg);
    doc["min_abs_delta"] = d.min_abs_delta;
    doc["argmin_mode"] = d.argmin;
    doc["flagged_modes"] = ex.modes();
    Json deltas = Json::array();
    for (std::size_t k = 0; k < d.delta.size(); ++k) deltas.push_back({{"k", k + 1}, {"delta", d.delta[k]}});
    doc["delta_values"] = std::move(deltas);
    write_json_file(cfg.output_dir / "report.json", doc);
    err << "error: " << ex.what() << "\n";
}

int cmd_invert(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Pipeline pl = build_pipeline(cfg);
    ProblemSpec spec = problem_of(cfg);
    spec.phi = data_samples(cfg.phi, pl, cfg.base_dir);
    spec.psi = data_samples(cfg.psi, pl, cfg.base_dir);
    const ReconstructOptions opts = options_of(cfg);
    ReconstructionReport r;
    try {
        r = reconstruct(pl.problem, spec, opts);
    } catch (const IllPosedModeError& ex) {
        write_ill_posed(cfg, pl, ex, err);
        return 2;
    }
    const auto f_x = pull_function(pl.map, r.f);
    write_csv_file(cfg.output_dir / "f.csv", x_samples_csv(pl, r.f, "f"));
    write_csv_file(cfg.output_dir / "u.csv", field_csv(pl, r.u_field, cfg.x_stride));
    Json doc = report_to_json(r, spec, opts);
    doc["numerics"]["n_grid"] = cfg.n_grid;
    doc["K"] = pl.map.K;
    doc["f_l2_norm"] = l2_norm(simpson_weights(pl.map.x_grid), f_x);
    doc["files"] = {{"f", "f.csv"}, {"u", "u.csv"}};
    write_json_file(cfg.output_dir / "report.json", doc);
    out << "min |delta| = " << format_double(r.deltas.min_abs_delta) << " (mode " << r.deltas.argmin << ")\n";
    out << "||u(q) - phi|| = " << format_double(r.residual_q) << "\n";
    out << "||u(-p) - psi|| = " << format_double(r.residual_p) << "\n";
    return 0;
}

int cmd_forward(const RunConfig& cfg, std::ostream& out) {
    const Pipeline pl = build_pipeline(cfg);
    const ProblemSpec spec = problem_of(cfg);
    spec.validate();
    const auto f = project(pl.sys, data_samples(cfg.source, pl, cfg.base_dir));
    const auto v0 = project(pl.sys, data_samples(cfg.initial, pl, cfg.base_dir));
    std::vector<ModeSolution> modes(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) {
        modes[k] = make_mode(static_cast<int>(k) + 1, cfg.beta, pl.problem.lambda[k], f[k], v0[k]);
    }
    const auto t = make_time_grid(cfg.p, cfg.q, cfg.n_t_neg, cfg.n_t_pos);
    const auto field = assemble_field(pl.problem, modes, cfg.alpha, cfg.beta, t);
    write_csv_file(cfg.output_dir / "u.csv", field_csv(pl, field, cfg.x_stride));
    const auto phi = field_at(pl.problem, modes, cfg.alpha, cfg.beta, cfg.q);
    const auto psi = field_at(pl.problem, modes, cfg.alpha, cfg.beta, -cfg.p);
    write_csv_file(cfg.output_dir / "phi.csv", x_samples_csv(pl, phi, "phi"));
    write_csv_file(cfg.output_dir / "psi.csv", x_samples_csv(pl, psi, "psi"));
    Json doc;
    doc["problem"] = problem_json(cfg);
    doc["gluing_at_t_min"] = gluing_residual(modes, cfg.alpha, cfg.beta, cfg.p, cfg.q, cfg.t_min);
    doc["files"] = {{"u", "u.csv"}, {"phi", "phi.csv"}, {"psi", "psi.csv"}};
    write_json_file(cfg.output_dir / "forward.json", doc);
    out << "gluing residual at t_min = " << format_double(doc["gluing_at_t_min"].get<double>()) << "\n";
    return 0;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
    const Pipeline pl = build_pipeline(cfg);
    problem_of(cfg).validate();
    const auto d = diagnose(pl.problem, cfg.alpha, cfg.beta, cfg.p, cfg.q, 0, cfg.delta_floor, cfg.delta_warn);
    CsvTable t;
    t.header = {"k", "lambda", "delta", "abs_delta", "flagged"};
    t.columns.assign(5, {});
    for (std::size_t k = 0; k < d.delta.size(); ++k) {
        t.columns[0].push_back(static_cast<double>(k + 1));
        t.columns[1].push_back(d.lambda[k]);
        t.columns[2].push_back(d.delta[k]);
        t.columns[3].push_back(std::abs(d.delta[k]));
        t.columns[4].push_back(std::abs(d.delta[k]) < cfg.delta_floor ? 1.0 : 0.0);
    }
    write_csv_file(cfg.output_dir / "delta.csv", t);
    Json doc;
    doc["problem"] = problem_json(cfg);
    doc["min_abs_delta"] = d.min_abs_delta;
    doc["argmin_mode"] = d.argmin;
    doc["flagged_modes"] = d.flagged;
    doc["warned_modes"] = d.warned;
    doc["files"] = {{"delta", "delta.csv"}};
    write_json_file(cfg.output_dir / "diagnose.json", doc);
    out << "min |delta| = " << format_double(d.min_abs_delta) << " (mode " << d.argmin << "), "
        << d.flagged.size() << " flagged\n";
    return 0;
}

int cmd_catalog(const RunConfig& cfg, std::ostream& out) {
    const Pipeline pl = build_pipeline(cfg);
    const int k_max = static_cast<int>(count(cfg.catalog, "k_max", 3));
    const int n_max = static_cast<int>(count(cfg.catalog, "n_max", 2));
    const std::size_t witness = count(cfg.catalog, "witness", 0);
    const auto cat = illposed_p_catalog(pl.problem, cfg.alpha, cfg.q, k_max, n_max);
    write_csv_file(cfg.output_dir / "catalog.csv", catalog_to_csv(cat));
    out << cat.entries.size() << " catalog entries\n";
    if (witness > 0) {
        Json list = Json::array();
        for (std::size_t i = 0; i < std::min(witness, cat.entries.size()); ++i) {
            const auto& e = cat.entries[i];
            const auto ns = null_solution(pl.problem, cfg.alpha, cfg.q, e.k, e.p, cfg.n_t_neg, cfg.n_t_pos);
            list.push_back({{"k", e.k},
                            {"n", e.n},
                            {"branch", e.branch},
                            {"p", e.p},
                            {"delta", ns.delta},
                            {"f_l", ns.mode.f},
                            {"trace_q", ns.trace_q},
                            {"trace_p", ns.trace_p},
                            {"norm_u0", ns.norm_u0},
                            {"norm_f", ns.norm_f}});
            out << "witness k=" << e.k << " p=" << format_double(e.p)
                << ": ||u(q)|| = " << format_double(ns.trace_q) << ", ||u(-p)|| = " << format_double(ns.trace_p)
                << ", ||u(0)|| = " << format_double(ns.norm_u0) << "\n";
        }
        write_json_file(cfg.output_dir / "witness.json", Json{{"witnesses", list}});
    }
    return 0;
}

int cmd_probe(const RunConfig& cfg, std::ostream& out) {
    const Pipeline pl = build_pipeline(cfg);
    const std::string mode = cfg.probe.value("mode", std::string("large_q"));
    if (mode == "rational_p") {
        const int m = static_cast<int>(count(cfg.probe, "m", 1));
        const int n = static_cast<int>(count(cfg.probe, "n", 1));
        const int k_max = static_cast<int>(count(cfg.probe, "k_max", pl.problem.n_modes()));
        const auto r = rational_p_probe(pl.problem, cfg.alpha, cfg.q, m, n, k_max);
        write_json_file(cfg.output_dir / "probe_rational_p.json", probe_to_json(r));
        out << "rational p = " << r.m << "/" << r.n << ": min |delta| = " << format_double(r.min_abs_delta)
            << ", delta_hat = " << format_double(r.delta_hat) << ", burn-in k = " << r.burn_in << "\n";
    } else if (mode == "large_q") {
        std::vector<double> ladder = {1, 2, 4, 8, 16};
        if (cfg.probe.contains("q_ladder")) ladder = cfg.probe["q_ladder"].get<std::vector<double>>();
        const auto r = large_q_probe(pl.problem, cfg.alpha, cfg.beta, cfg.p, ladder);
        write_json_file(cfg.output_dir / "probe_large_q.json", probe_to_json(r));
        out << "c_hat = " << format_double(r.c_hat) << ", limit = " << format_double(r.bracket_limit)
            << ", holds = " << (r.holds ? "yes" : "no") << "\n";
        for (std::size_t i = 0; i < r.q_ladder.size(); ++i) {
            out << "q = " << format_double(r.q_ladder[i]) << ": min |delta| = " << format_double(r.min_abs_delta[i])
                << "\n";
        }
    } else if (mode == "stability") {
        ProblemSpec spec = problem_of(cfg);
        spec.phi = data_samples(cfg.phi, pl, cfg.base_dir);
        spec.psi = data_samples(cfg.psi, pl, cfg.base_dir);
        std::vector<double> levels = {1e-6, 1e-3};
        if (cfg.probe.contains("noise_levels")) levels = cfg.probe["noise_levels"].get<std::vector<double>>();
        const int trials = static_cast<int>(count(cfg.probe, "n_trials", 100));
        Json list = Json::array();
        for (std::size_t i = 0; i < levels.size(); ++i) {
            const auto r = stability_probe(pl.problem, spec, levels[i], trials, cfg.seed + i, 0, cfg.delta_floor);
            list.push_back(probe_to_json(r));
            out << "noise " << format_double(levels[i]) << ": ratio in [" << format_double(r.min_ratio) << ", "
                << format_double(r.max_ratio) << "], bound " << format_double(r.lipschitz_bound) << "\n";
        }
        write_json_file(cfg.output_dir / "probe_stability.json",
                        Json{{"problem", problem_json(cfg)}, {"seed", cfg.seed}, {"levels", list}});
    } else {
        bad_config("probe.mode must be rational_p, large_q or stability");
    }
    return 0;
}

int cmd_roundtrip(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Pipeline pl = build_pipeline(cfg);
    std::vector<double> f_star = {1.0, -0.5, 0.25, 0.125, -0.0625};
    std::vector<double> v0_star = {0.3, -0.2, 0.1, 0.05, -0.02};
    if (cfg.manufactured.contains("f_coeffs")) f_star = cfg.manufactured["f_coeffs"].get<std::vector<double>>();
    if (cfg.manufactured.contains("v0_coeffs")) v0_star = cfg.manufactured["v0_coeffs"].get<std::vector<double>>();
    const std::size_t m = std::max(f_star.size(), v0_star.size());
    if (m > pl.problem.n_modes()) bad_config("manufactured coefficients exceed n_modes");
    f_star.resize(m, 0.0);
    v0_star.resize(m, 0.0);

    std::vector<ModeSolution> modes(m);
    for (std::size_t k = 0; k < m; ++k) {
        modes[k] = make_mode(static_cast<int>(k) + 1, cfg.beta, pl.problem.lambda[k], f_star[k], v0_star[k]);
    }
    ProblemSpec spec = problem_of(cfg);
    spec.phi = field_at(pl.problem, modes, cfg.alpha, cfg.beta, cfg.q);
    spec.psi = field_at(pl.problem, modes, cfg.alpha, cfg.beta, -cfg.p);
    ReconstructOptions opts = options_of(cfg);
    opts.assemble = false;
    ReconstructionReport r;
    try {
        r = reconstruct(pl.problem, spec, opts);
    } catch (const IllPosedModeError& ex) {
        write_ill_posed(cfg, pl, ex, err);
        return 2;
    }
    const auto f_ref = synthesize(pl.sys, f_star);
    std::vector<double> diff(f_ref.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = r.f[i] - f_ref[i];
    const double rel = l2_norm(pl.sys.weights, diff) / l2_norm(pl.sys.weights, f_ref);

    Json doc;
    doc["problem"] = problem_json(cfg);
    doc["f_star"] = f_star;
    doc["v0_star"] = v0_star;
    doc["relative_f_error"] = rel;
    doc["residual_q"] = r.residual_q;
    doc["residual_p"] = r.residual_p;
    doc["min_abs_delta"] = r.deltas.min_abs_delta;
    doc["f_coeffs"] = r.f_coeffs;
    write_json_file(cfg.output_dir / "roundtrip.json", doc);
    out << "relative f error: " << format_double(rel) << "\n";
    out << "||u(q) - phi||: " << format_double(r.residual_q) << "\n";
    out << "||u(-p) - psi||: " << format_double(r.residual_p) << "\n";
    return 0;
}

int cmd_mlf_table(const RunConfig& cfg, std::ostream& out) {
    const Json& t = cfg.mlf_table;
    const MlfParams params{num(t, "alpha", 0.5), num(t, "beta", 1.0)};
    const double z0 = num(t, "z_min", -100.0), z1 = num(t, "z_max", 0.0);
    const std::size_t n = count(t, "n", 201);
    if (n < 2 || !(z0 < z1)) bad_config("mlf_table needs n >= 2 and z_min < z_max");
    CsvTable table;
    table.header = {"z", "E"};
    table.columns.assign(2, std::vector<double>(n));
    const UniformGrid g(z0, z1, n);
    parallel_for(n, [&](std::size_t i) {
        table.columns[0][i] = g[i];
        table.columns[1][i] = mlf_eval(params, g[i]);
    });
    write_csv_file(cfg.output_dir / "mlf.csv", table);
    out << n << " values written\n";
    return 0;
}

}  // namespace

RunConfig parse_config(const Json& doc, const fs::path& base_dir) {
    check_keys(doc, {"command", "operator", "orders", "times", "data", "numerics", "catalog", "probe",
                     "manufactured", "mlf_table", "seed", "output_dir"},
               "config");
    RunConfig cfg;
    cfg.base_dir = base_dir;
    if (!doc.contains("command") || !doc["command"].is_string()) bad_config("'command' is required");
    cfg.command = doc["command"].get<std::string>();
    if (!kCommands.count(cfg.command)) bad_config("unknown command '" + cfg.command + "'");

    try {
        cfg.operator_spec = normalize_operator(doc.value("operator", Json("zero-potential")));
        if (doc.contains("orders")) {
            const Json& o = doc["orders"];
            check_keys(o, {"alpha", "beta"}, "orders");
            cfg.alpha = num(o, "alpha", cfg.alpha);
            cfg.beta = num(o, "beta", cfg.beta);
        }
        if (doc.contains("times")) {
            const Json& t = doc["times"];
            check_keys(t, {"p", "q"}, "times");
            cfg.p = num(t, "p", cfg.p);
            cfg.q = num(t, "q", cfg.q);
        }
        if (doc.contains("data")) {
            const Json& d = doc["data"];
            check_keys(d, {"phi", "psi", "f", "v0"}, "data");
            cfg.phi = d.value("phi", cfg.phi);
            cfg.psi = d.value("psi", cfg.psi);
            cfg.source = d.value("f", cfg.source);
            cfg.initial = d.value("v0", cfg.initial);
        }
        if (doc.contains("numerics")) {
            const Json& n = doc["numerics"];
            check_keys(n, {"n_grid", "n_modes", "delta_floor", "delta_warn", "t_min", "n_t_neg", "n_t_pos",
                           "x_stride", "eigensolver"},
                       "numerics");
            cfg.n_grid = count(n, "n_grid", cfg.n_grid);
            cfg.n_modes = count(n, "n_modes", cfg.n_modes);
            cfg.delta_floor = num(n, "delta_floor", cfg.delta_floor);
            cfg.delta_warn = num(n, "delta_warn", cfg.delta_warn);
            cfg.t_min = num(n, "t_min", cfg.t_min);
            cfg.n_t_neg = count(n, "n_t_neg", cfg.n_t_neg);
            cfg.n_t_pos = count(n, "n_t_pos", cfg.n_t_pos);
            cfg.x_stride = count(n, "x_stride", cfg.x_stride);
            cfg.eigensolver = n.value("eigensolver", cfg.eigensolver);
            if (cfg.eigensolver != "auto" && cfg.eigensolver != "fd") {
                bad_config("numerics.eigensolver must be auto or fd");
            }
        }
        cfg.catalog = doc.value("catalog", Json::object());
        check_keys(cfg.catalog, {"k_max", "n_max", "witness"}, "catalog");
        cfg.probe = doc.value("probe", Json::object());
        check_keys(cfg.probe, {"mode", "m", "n", "k_max", "q_ladder", "noise_levels", "n_trials"}, "probe");
        cfg.manufactured = doc.value("manufactured", Json::object());
        check_keys(cfg.manufactured, {"f_coeffs", "v0_coeffs"}, "manufactured");
        cfg.mlf_table = doc.value("mlf_table", Json::object());
        check_keys(cfg.mlf_table, {"alpha", "beta", "z_min", "z_max", "n"}, "mlf_table");
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
    } catch (const nlohmann::json::exception& ex) {
        bad_config(ex.what());
    }
    if (cfg.output_dir.is_relative()) cfg.output_dir = base_dir / cfg.output_dir;
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    const Json doc = read_json_file(path);
    return parse_config(doc, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

Json config_to_json(const RunConfig& cfg) {
    Json doc;
    doc["command"] = cfg.command;
    doc["operator"] = cfg.operator_spec;
    doc["orders"] = {{"alpha", cfg.alpha}, {"beta", cfg.beta}};
    doc["times"] = {{"p", cfg.p}, {"q", cfg.q}};
    doc["data"] = {{"phi", cfg.phi}, {"psi", cfg.psi}, {"f", cfg.source}, {"v0", cfg.initial}};
    doc["numerics"] = {{"n_grid", cfg.n_grid},       {"n_modes", cfg.n_modes}, {"delta_floor", cfg.delta_floor},
                       {"delta_warn", cfg.delta_warn}, {"t_min", cfg.t_min},     {"n_t_neg", cfg.n_t_neg},
                       {"n_t_pos", cfg.n_t_pos},     {"x_stride", cfg.x_stride}, {"eigensolver", cfg.eigensolver}};
    doc["catalog"] = cfg.catalog;
    doc["probe"] = cfg.probe;
    doc["manufactured"] = cfg.manufactured;
    doc["mlf_table"] = cfg.mlf_table;
    doc["seed"] = cfg.seed;
    return doc;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        fs::create_directories(cfg.output_dir);
        write_json_file(cfg.output_dir / "effective_config.json", config_to_json(cfg));
        if (cfg.command == "eigs") return cmd_eigs(cfg, out);
        if (cfg.command == "forward") return cmd_forward(cfg, out);
        if (cfg.command == "invert") return cmd_invert(cfg, out, err);
        if (cfg.command == "diagnose") return cmd_diagnose(cfg, out);
        if (cfg.command == "catalog") return cmd_catalog(cfg, out);
        if (cfg.command == "probe") return cmd_probe(cfg, out);
        if (cfg.command == "roundtrip") return cmd_roundtrip(cfg, out, err);
        if (cfg.command == "mlf-table") return cmd_mlf_table(cfg, out);
        bad_config("unknown command '" + cfg.command + "'");
    } catch (const IllPosedModeError& ex) {
        err << "error: " << ex.what() << "\n";
        return 2;
    } catch (const Error& ex) {
        err << "error: " << ex.what() << "\n";
        return 1;
    } catch (const fs::filesystem_error& ex) {
        err << "error: InputError: " << ex.what() << "\n";
        return 1;
    }
}

int cli_main(int argc, char** argv) {
    CLI::App app{"fracmix: inverse source problems for mixed parabolic-hyperbolic equations"};
    std::string config_path;
    std::string output;
    unsigned threads = 0;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--output", output, "output directory (overrides output_dir)");
    app.add_option("--threads", threads, "worker threads, 0 = auto");
    app.add_option("--seed", seed, "noise seed for the stability probe");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        configure_logging_from_env();
        set_thread_count(threads);
        RunConfig cfg = load_config(config_path);
        if (!output.empty()) cfg.output_dir = output;
        if (seed) cfg.seed = *seed;
        return run(cfg, std::cout, std::cerr);
    } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}

}  // namespace fracmix
