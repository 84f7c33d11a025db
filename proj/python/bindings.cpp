#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vfil/compat.hpp"
#include "vfil/harness.hpp"
#include "vfil/io.hpp"
#include "vfil/reflect.hpp"

namespace py = pybind11;
using namespace vfil;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<Vec3> to_vectors(const Array& a) {
    if (a.ndim() != 2 || a.shape(1) != 3) throw Error(ErrorCode::InvalidArgument, "expected an (n, 3) array");
    const auto r = a.unchecked<2>();
    std::vector<Vec3> out(static_cast<std::size_t>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.shape(0); ++i) out[static_cast<std::size_t>(i)] = {r(i, 0), r(i, 1), r(i, 2)};
    return out;
}

Array to_array(std::span<const Vec3> v) {
    Array a({static_cast<py::ssize_t>(v.size()), py::ssize_t{3}});
    auto w = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto k = static_cast<py::ssize_t>(i);
        w(k, 0) = v[i].x;
        w(k, 1) = v[i].y;
        w(k, 2) = v[i].z;
    }
    return a;
}

py::array_t<double> nodes(const Grid& g) {
    py::array_t<double> s(static_cast<py::ssize_t>(g.size()));
    auto w = s.mutable_unchecked<1>();
    for (std::size_t i = 0; i < g.size(); ++i) w(static_cast<py::ssize_t>(i)) = g.s(i);
    return s;
}

Grid make_grid(const std::string& kind, double length, std::size_t n) {
    if (kind == "half-line") return Grid::half_line(length, n);
    if (kind == "whole-line") return Grid::whole_line(length, n);
    if (kind == "periodic") return Grid::periodic(0.0, length, n);
    throw Error(ErrorCode::InvalidArgument, "unknown grid kind '" + kind + "'");
}

VectorField half_line_field(const Array& v, double length) {
    auto values = to_vectors(v);
    const auto g = Grid::half_line(length, values.size());
    return VectorField(g, std::move(values));
}

Scheme scheme_of(const std::string& name) { return parse_scheme(name); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    static py::exception<Error> error(m, "VfilError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(std::string(e.what()));
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    m.def("family_data", [](const std::string& family, const std::optional<std::string>& kind,
                            std::optional<double> length, std::optional<std::size_t> n) {
        const auto spec = FamilySpec::parse(family);
        Grid g = default_grid(spec);
        if (kind || length || n) {
            const std::string k = kind.value_or(to_string(g.kind()));
            const double def_len = g.kind() == GridKind::Periodic ? g.s_max() - g.s_min() : g.s_max();
            g = make_grid(k, length.value_or(def_len), n.value_or(g.size()));
        }
        const auto f = builtin_initial_data(spec, g);
        return py::make_tuple(nodes(g), to_array(f.values()));
    }, py::arg("family"), py::arg("kind") = py::none(), py::arg("length") = py::none(), py::arg("n") = py::none());

    m.def("check_json", [](const Array& v, double length, int order, double tol) {
        return io::to_json(check_compatibility(half_line_field(v, length), order, tol)).dump();
    }, py::arg("v"), py::arg("length"), py::arg("order"), py::arg("tol"));

    m.def("extend", [](const Array& v, double length) {
        const auto ext = extend(half_line_field(v, length));
        return py::make_tuple(nodes(ext.grid()), to_array(ext.values()));
    }, py::arg("v"), py::arg("length"));

    m.def("jump_residual", [](const Array& v, double length, int k) {
        return derivative_jump_residual(extend(half_line_field(v, length)), k);
    }, py::arg("v"), py::arg("length"), py::arg("k"));

    m.def("simulate", [](const std::map<std::string, std::string>& config, bool reconstruct) {
        auto spec = io::parse_run_spec(config);
        spec.reconstruct = spec.reconstruct || reconstruct;
        const auto r = io::run_simulation(spec);
        const TimeSeries& shown = r.half ? *r.half : r.trajectory;
        py::list snaps;
        for (const auto& s : shown.snapshots()) snaps.append(to_array(s.values()));
        py::list curves;
        for (const auto& c : r.curves) curves.append(to_array(c.positions));
        py::dict out;
        out["summary_json"] = io::to_json(r.summary).dump();
        out["s"] = nodes(shown.grid());
        out["times"] = shown.times();
        out["snapshots"] = snaps;
        out["curve_s"] = nodes(r.trajectory.grid());
        out["curves"] = curves;
        return out;
    }, py::arg("config"), py::arg("reconstruct") = false);

    m.def("oracle_json", [](const std::string& name, std::size_t n, double t_final,
                            const std::map<std::string, double>& params, const std::string& scheme) {
        OracleOptions opts;
        opts.n = n;
        opts.t_final = t_final;
        opts.params = params;
        opts.scheme = scheme_of(scheme);
        return io::to_json(oracle_error(name, opts)).dump();
    }, py::arg("name"), py::arg("n"), py::arg("t_final"), py::arg("params"), py::arg("scheme"));

    m.def("convergence_json", [](const std::string& name, const std::vector<std::size_t>& levels, double t_final,
                                 const std::map<std::string, double>& params, const std::string& scheme) {
        StudyOptions opts;
        opts.t_final = t_final;
        opts.params = params;
        opts.scheme = scheme_of(scheme);
        py::gil_scoped_release release;
        return io::to_json(convergence_study(name, levels, opts)).dump();
    }, py::arg("name"), py::arg("levels"), py::arg("t_final"), py::arg("params"), py::arg("scheme"));

    m.attr("ORACLE_TOLERANCE") = oracle_tolerance;
    m.attr("ORDER_BAND") = py::make_tuple(order_band_low, order_band_high);
}
