#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zkflat/genfun.hpp"
#include "zkflat/gevrey.hpp"
#include "zkflat/io.hpp"
#include "zkflat/pipeline.hpp"

namespace py = pybind11;
using namespace zkflat;

namespace {

Params params_from_kwargs(double a, double t_final, double tau, double s, double m,
                          int i_max, int j_max, int nx, int ny, int nt) {
    Params p;
    p.a = a;
    p.t_final = t_final;
    p.tau = tau;
    p.gevrey_order = s;
    p.bump_steepness = m;
    p.i_max = i_max;
    p.j_max = j_max;
    p.nx = nx;
    p.ny = ny;
    p.nt = nt;
    p.validate();
    return p;
}

py::dict control_dict(const ControlSignal& cs) {
    py::dict d;
    d["t"] = cs.t;
    d["y"] = cs.y;
    std::vector<std::vector<double>> h(cs.t.size(), std::vector<double>(cs.y.size()));
    for (size_t k = 0; k < cs.t.size(); ++k)
        for (size_t iy = 0; iy < cs.y.size(); ++iy)
            h[k][iy] = cs.h(static_cast<int>(k), static_cast<int>(iy));
    d["h"] = h;
    d["synthesis_type"] = cs.synthesis_type;
    return d;
}

py::dict field_dict(const Field& f) {
    py::dict d;
    d["x"] = f.grid.x;
    d["y"] = f.grid.y;
    std::vector<std::vector<double>> v(f.grid.nx(), std::vector<double>(f.grid.ny()));
    for (int ix = 0; ix < f.grid.nx(); ++ix)
        for (int iy = 0; iy < f.grid.ny(); ++iy) v[ix][iy] = f.at(ix, iy);
    d["values"] = v;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "flatness-based boundary control for the linear Zakharov-Kuznetsov equation";

    py::class_<Params>(m, "Params")
        .def(py::init(&params_from_kwargs), py::arg("a") = 1.0, py::arg("t_final") = 1.0,
             py::arg("tau") = 0.4, py::arg("s") = 1.6, py::arg("m") = 1.0,
             py::arg("i_max") = 15, py::arg("j_max") = 4, py::arg("nx") = 64,
             py::arg("ny") = 33, py::arg("nt") = 2000)
        .def_readwrite("a", &Params::a)
        .def_readwrite("t_final", &Params::t_final)
        .def_readwrite("tau", &Params::tau)
        .def_readwrite("s", &Params::gevrey_order)
        .def_readwrite("m", &Params::bump_steepness)
        .def_readwrite("i_max", &Params::i_max)
        .def_readwrite("j_max", &Params::j_max)
        .def_readwrite("nx", &Params::nx)
        .def_readwrite("ny", &Params::ny)
        .def_readwrite("nt", &Params::nt)
        .def("validate", &Params::validate);

    py::class_<TransverseBasis>(m, "TransverseBasis")
        .def(py::init<int>(), py::arg("j_max"))
        .def("lam", &TransverseBasis::lambda, py::arg("j"))
        .def("eval", &TransverseBasis::eval, py::arg("j"), py::arg("y"))
        .def_property_readonly("lambdas", &TransverseBasis::lambdas);

    m.def("make_basis", &make_basis, py::arg("j_max"));
    m.def(
        "sine_analyze",
        [](const std::vector<double>& f, const std::vector<double>& y,
           const TransverseBasis& b) { return sine_analyze(f, y, b); },
        py::arg("samples"), py::arg("y_nodes"), py::arg("basis"));
    m.def(
        "sine_synthesize",
        [](const std::vector<double>& c, const std::vector<double>& y,
           const TransverseBasis& b) { return sine_synthesize(c, y, b); },
        py::arg("coeffs"), py::arg("y_nodes"), py::arg("basis"));

    py::class_<GenFunTable>(m, "GenFunTable")
        .def_readonly("a", &GenFunTable::a)
        .def_readonly("i_max", &GenFunTable::i_max)
        .def_readonly("j_max", &GenFunTable::j_max)
        .def("eval", &GenFunTable::eval, py::arg("i"), py::arg("j"), py::arg("x"),
             py::arg("deriv_order") = 0)
        .def("to_json", [](const GenFunTable& t) { return table_to_json(t); });
    m.def("table_from_json", &table_from_json, py::arg("text"));
    m.def(
        "build_table",
        [](const Params& p, int threads) {
            return build_table(p, TransverseBasis(p.j_max), {}, threads);
        },
        py::arg("params"), py::arg("threads") = 1);
    m.def(
        "check_bound",
        [](const GenFunTable& t, int samples) {
            const BoundReport rep = check_bound(t, bound_samples(samples));
            py::dict d;
            d["pass"] = rep.pass();
            d["max_ratio"] = rep.max_ratio;
            d["violations"] = rep.violations.size();
            d["fitted_c"] = rep.fitted_c;
            return d;
        },
        py::arg("table"), py::arg("samples") = 101);

    m.def(
        "bump",
        [](double rho, double s, double m_) {
            return bump(BumpParams{s, m_, 0.0, 1.0, 40}, rho);
        },
        py::arg("rho"), py::arg("s") = 1.6, py::arg("m") = 1.0);
    m.def(
        "bump_deriv",
        [](double rho, int order, double s, double m_) {
            return bump_deriv(BumpParams{s, m_, 0.0, 1.0, 40}, rho, order);
        },
        py::arg("rho"), py::arg("order"), py::arg("s") = 1.6, py::arg("m") = 1.0);
    m.def(
        "step_deriv",
        [](const Params& p, double t, int order) {
            return step_deriv(BumpParams::from(p), t, order);
        },
        py::arg("params"), py::arg("t"), py::arg("order"));

    py::class_<GevreyInterpolant>(m, "GevreyInterpolant")
        .def("deriv", &GevreyInterpolant::deriv, py::arg("x"), py::arg("order"))
        .def_property_readonly("anchor", &GevreyInterpolant::anchor)
        .def_property_readonly("fitted_c", &GevreyInterpolant::fitted_c);
    m.def("borel_interpolate", &borel_interpolate, py::arg("d"), py::arg("h"),
          py::arg("h_tilde"), py::arg("anchor") = 0.0,
          py::arg("r") = 0.36787944117144233);

    m.def(
        "run_null",
        [](const Params& p, const std::string& u0, int threads) {
            const NullRun run = run_null(p, Expr::parse(u0), threads);
            py::dict d;
            d["u0_norm"] = run.u0_norm;
            d["terminal_norm"] = run.terminal_norm;
            d["terminal_rel"] = run.terminal_rel;
            d["control_pre_tau_max"] = run.control_pre_tau_max;
            d["splice_gap_rel"] = run.splice_gap_rel;
            d["series_residual"] = run.series_residual.max_abs;
            d["series_scale"] = run.series_residual.scale;
            d["control"] = control_dict(run.control);
            d["terminal"] = field_dict(run.terminal);
            return d;
        },
        py::arg("params"), py::arg("u0"), py::arg("threads") = 1);

    m.def(
        "run_reach",
        [](const Params& p, const std::vector<std::tuple<int, int, double>>& terms,
           int threads) {
            std::vector<TargetTerm> tt;
            for (const auto& [i, j, beta] : terms) tt.push_back({i, j, beta});
            const ReachRun run = run_reach(p, TargetSpec::exact(tt), threads);
            py::dict d;
            d["terminal_rel"] = run.terminal_rel;
            d["interp_terminal_rel"] = run.interp_terminal_rel;
            d["initial_zero_max"] = run.initial_zero_max;
            d["series_residual"] = run.series_residual.max_abs;
            d["series_scale"] = run.series_residual.scale;
            std::vector<std::tuple<int, int, double>> coeffs;
            for (int j = 1; j <= p.j_max; ++j)
                for (int i = 0; i <= p.i_max; ++i)
                    if (run.coeffs.at(i, j) != 0.0)
                        coeffs.emplace_back(i, j, run.coeffs.at(i, j));
            d["coefficients"] = coeffs;
            d["control"] = control_dict(run.control);
            d["terminal"] = field_dict(run.terminal);
            d["target"] = field_dict(run.target);
            return d;
        },
        py::arg("params"), py::arg("target_terms"), py::arg("threads") = 1);

    m.def(
        "run_free",
        [](const Params& p, const std::string& u0, int threads) {
            const Grid grid = Grid::make(p);
            const FreeRun run = run_free(p, field_from_expr(Expr::parse(u0), grid), threads);
            py::dict d;
            d["worst_identity_rel"] = run.worst_identity_rel;
            d["worst_weighted_rel"] = run.worst_weighted_rel;
            d["worst_bc"] = run.worst_bc;
            return d;
        },
        py::arg("params"), py::arg("u0"), py::arg("threads") = 1);
}
