#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "fracmix/cli.hpp"
#include "fracmix/errors.hpp"
#include "fracmix/inverse.hpp"
#include "fracmix/mlf.hpp"
#include "fracmix/spectral.hpp"

namespace py = pybind11;
using namespace fracmix;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-d array");
    return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

Array modes_array(const EigenSystem& sys) {
    const auto rows = static_cast<py::ssize_t>(sys.n_modes());
    const auto cols = static_cast<py::ssize_t>(sys.grid.n);
    Array out({rows, cols});
    auto m = out.mutable_unchecked<2>();
    for (py::ssize_t k = 0; k < rows; ++k)
        for (py::ssize_t i = 0; i < cols; ++i) m(k, i) = sys.modes[k][i];
    return out;
}

py::dict report_dict(const ReconstructionReport& r) {
    py::dict d;
    d["f"] = to_array(r.f);
    d["f_coeffs"] = to_array(r.f_coeffs);
    d["phi_coeffs"] = to_array(r.phi_coeffs);
    d["psi_coeffs"] = to_array(r.psi_coeffs);
    d["delta"] = to_array(r.deltas.delta);
    d["min_abs_delta"] = r.deltas.min_abs_delta;
    d["argmin_mode"] = r.deltas.argmin;
    d["warned_modes"] = r.deltas.warned;
    d["zero_over_zero"] = r.zero_over_zero;
    d["residual_q"] = r.residual_q;
    d["residual_p"] = r.residual_p;
    d["truncation_q"] = r.truncation_q;
    d["truncation_p"] = r.truncation_p;
    d["gluing"] = r.gluing;
    d["tail_estimate"] = r.tail_estimate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    // Raw type handles outlive the module's teardown; the exception types are never freed.
    static PyObject* error = py::exception<Error>(m, "FracmixError").release().ptr();
    static PyObject* ill_posed = py::exception<IllPosedModeError>(m, "IllPosedModeError", error).release().ptr();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const IllPosedModeError& e) {
            py::object exc = py::handle(ill_posed)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            exc.attr("modes") = e.modes();
            PyErr_SetObject(ill_posed, exc.ptr());
        } catch (const Error& e) {
            py::object exc = py::handle(error)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error, exc.ptr());
        }
    });

    m.def("mlf", [](double alpha, double beta, double z) { return mlf_eval({alpha, beta}, z); },
          py::arg("alpha"), py::arg("beta"), py::arg("z"));
    m.def("mlf_array", [](double alpha, double beta, const Array& z) {
        Array out(z.request().shape);
        const double* in = z.data();
        double* o = out.mutable_data();
        for (py::ssize_t i = 0; i < z.size(); ++i) o[i] = mlf_eval({alpha, beta}, in[i]);
        return out;
    }, py::arg("alpha"), py::arg("beta"), py::arg("z"));

    py::class_<EigenSystem>(m, "EigenSystem")
        .def_property_readonly("x", [](const EigenSystem& s) {
            std::vector<double> x(s.grid.n);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.grid[i];
            return to_array(x);
        })
        .def_property_readonly("weights", [](const EigenSystem& s) { return to_array(s.weights); })
        .def_property_readonly("potential", [](const EigenSystem& s) { return to_array(s.potential); })
        .def_property_readonly("eigenvalues", [](const EigenSystem& s) { return to_array(s.lambda); })
        .def_property_readonly("modes", &modes_array)
        .def_property_readonly("n_modes", &EigenSystem::n_modes)
        .def("project", [](const EigenSystem& s, const Array& v) { return to_array(project(s, to_vec(v))); })
        .def("synthesize", [](const EigenSystem& s, const Array& c) { return to_array(synthesize(s, to_vec(c))); });

    m.def("solve_eigensystem", [](const Array& g, std::size_t n_modes, std::size_t n_grid) {
        return solve_eigensystem(to_vec(g), n_modes, n_grid);
    }, py::arg("g"), py::arg("n_modes") = kDefaultModes, py::arg("n_grid") = kDefaultGridPoints);
    m.def("constant_potential_system", &constant_potential_system, py::arg("c"),
          py::arg("n_modes") = kDefaultModes, py::arg("n_grid") = kDefaultGridPoints);

    m.def("delta_problem1", &delta_problem1, py::arg("alpha"), py::arg("lam"), py::arg("p"), py::arg("q"));
    m.def("delta_problem2", &delta_problem2, py::arg("alpha"), py::arg("beta"), py::arg("lam"), py::arg("p"),
          py::arg("q"));
    m.def("mode_delta", &mode_delta, py::arg("alpha"), py::arg("beta"), py::arg("lam"), py::arg("p"), py::arg("q"));

    m.def("reconstruct", [](const EigenSystem& sys, double alpha, double beta, double p, double q, const Array& phi,
                            const Array& psi, std::size_t n_modes, double delta_floor, double t_min) {
        ProblemSpec spec;
        spec.alpha = alpha;
        spec.beta = beta;
        spec.p = p;
        spec.q = q;
        spec.phi = to_vec(phi);
        spec.psi = to_vec(psi);
        ReconstructOptions opts;
        opts.n_modes = n_modes;
        opts.delta_floor = delta_floor;
        opts.t_min = t_min;
        opts.assemble = false;
        return report_dict(reconstruct(sys, spec, opts));
    }, py::arg("sys"), py::arg("alpha"), py::arg("beta"), py::arg("p"), py::arg("q"), py::arg("phi"),
       py::arg("psi"), py::arg("n_modes") = 0, py::arg("delta_floor") = kDefaultDeltaFloor,
       py::arg("t_min") = kDefaultTMin);

    m.def("illposed_p_catalog", [](const EigenSystem& sys, double alpha, double q, int k_max, int n_max) {
        py::list rows;
        for (const auto& e : illposed_p_catalog(sys, alpha, q, k_max, n_max).entries) {
            py::dict d;
            d["k"] = e.k;
            d["n"] = e.n;
            d["branch"] = e.branch;
            d["p"] = e.p;
            d["delta"] = e.delta;
            rows.append(d);
        }
        return rows;
    }, py::arg("sys"), py::arg("alpha"), py::arg("q"), py::arg("k_max"), py::arg("n_max"));

    // Runs a JSON config as the command-line tool would; returns (exit code, stdout, stderr).
    m.def("run_config", [](const std::filesystem::path& path, std::optional<std::filesystem::path> output_dir) {
        std::ostringstream out, err;
        int code = 1;
        try {
            RunConfig cfg = load_config(path);
            if (output_dir) cfg.output_dir = *output_dir;
            code = run(cfg, out, err);
        } catch (const Error& e) {
            err << "error: " << e.what() << "\n";
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("path"), py::arg("output_dir") = py::none());
}
