#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sphaerica/apps.hpp"
#include "sphaerica/errors.hpp"
#include "sphaerica/harmonics.hpp"
#include "sphaerica/io.hpp"
#include "sphaerica/kernels.hpp"
#include "sphaerica/layers.hpp"
#include "sphaerica/run.hpp"
#include "sphaerica/solvers.hpp"

namespace py = pybind11;
using namespace sphaerica;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

std::vector<UnitVector> to_points(const Array& pts) {
    if (pts.ndim() != 2 || pts.shape(1) != 3) throw ValidationError("points must have shape (n, 3)");
    const auto r = pts.unchecked<2>();
    std::vector<UnitVector> out;
    for (py::ssize_t i = 0; i < r.shape(0); ++i) out.emplace_back(r(i, 0), r(i, 1), r(i, 2));
    return out;
}

Array from_points(const std::vector<UnitVector>& pts) {
    Array out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        w(i, 0) = pts[i].x();
        w(i, 1) = pts[i].y();
        w(i, 2) = pts[i].z();
    }
    return out;
}

Array from_vectors(const std::vector<Vec3>& v) {
    Array out({static_cast<py::ssize_t>(v.size()), py::ssize_t{3}});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < v.size(); ++i) {
        w(i, 0) = v[i].x;
        w(i, 1) = v[i].y;
        w(i, 2) = v[i].z;
    }
    return out;
}

std::vector<double> to_values(const Array& a, std::size_t n, const char* what) {
    if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != n) {
        throw ValidationError(std::string(what) + ": expected " + std::to_string(n) + " values");
    }
    return {a.data(), a.data() + n};
}

py::dict grid_dict(const QuadratureGrid& g) {
    py::dict d;
    d["nodes"] = from_points(g.nodes);
    d["weights"] = py::array(py::cast(g.weights));
    if (g.kind == GridKind::boundary_line) {
        std::vector<Vec3> normals, tangents;
        for (const auto& f : g.frames) {
            normals.push_back(f.normal);
            tangents.push_back(f.tangent);
        }
        d["normals"] = from_vectors(normals);
        d["tangents"] = from_vectors(tangents);
    }
    return d;
}

SphericalCap make_cap(const std::array<double, 3>& center, double radius) { return {UnitVector(to_vec(center)), radius}; }

py::dict report_dict(const AppReport& r) {
    py::dict d;
    d["probes"] = from_points(r.probes);
    d["values"] = py::array(py::cast(r.values));
    d["oracle"] = py::array(py::cast(r.oracle));
    d["sup_error"] = r.sup_error;
    d["rel_l2_error"] = r.rel_l2_error;
    d["rel_max_error"] = r.rel_max_error;
    d["condition"] = r.condition;
    d["boundary_residual"] = r.boundary_residual;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Potential theory on the unit sphere";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    m.def("unit_vector", [](double lon, double lat) {
        const UnitVector u = UnitVector::from_lonlat_deg(lon, lat);
        return std::array<double, 3>{u.x(), u.y(), u.z()};
    }, py::arg("lon_deg"), py::arg("lat_deg"));

    m.def("fundamental", &fundamental, py::arg("t"));
    m.def("dirichlet_green", [](const std::array<double, 3>& c, double rho, const std::array<double, 3>& xi,
                                const std::array<double, 3>& eta) {
        return dirichlet_green(make_cap(c, rho), UnitVector(to_vec(xi)).vec(), UnitVector(to_vec(eta)).vec());
    }, py::arg("center"), py::arg("radius"), py::arg("xi"), py::arg("eta"));
    m.def("neumann_green", [](const std::array<double, 3>& c, double rho, const std::array<double, 3>& xi,
                              const std::array<double, 3>& eta) {
        return neumann_green(make_cap(c, rho), UnitVector(to_vec(xi)).vec(), UnitVector(to_vec(eta)).vec());
    }, py::arg("center"), py::arg("radius"), py::arg("xi"), py::arg("eta"));

    m.def("inner_harmonic", [](const std::array<double, 3>& c, double rho, int n, int k, const Array& pts) {
        const InnerHarmonicIndex idx{make_cap(c, rho), n, k};
        std::vector<double> out;
        for (const auto& p : to_points(pts)) out.push_back(inner_harmonic_eval(idx, p.vec()));
        return py::array(py::cast(out));
    }, py::arg("center"), py::arg("radius"), py::arg("degree"), py::arg("order"), py::arg("points"));

    m.def("cap_grid", [](const std::array<double, 3>& c, double rho, std::size_t n_t, std::size_t n_phi) {
        return grid_dict(build_cap_grid(make_cap(c, rho), n_t, n_phi));
    }, py::arg("center"), py::arg("radius"), py::arg("n_t"), py::arg("n_phi"));
    m.def("sphere_grid", [](std::size_t n_t, std::size_t n_phi) { return grid_dict(build_sphere_grid(n_t, n_phi)); },
          py::arg("n_t"), py::arg("n_phi"));
    m.def("boundary_grid", [](const std::array<double, 3>& c, double rho, std::size_t mm) {
        return grid_dict(build_boundary_grid(make_cap(c, rho), mm));
    }, py::arg("center"), py::arg("radius"), py::arg("m"));

    m.def("dirichlet_solve", [](const std::array<double, 3>& c, double rho, const Array& F, const Array& pts) {
        const QuadratureGrid b = build_boundary_grid(make_cap(c, rho), static_cast<std::size_t>(F.size()));
        const ScalarSamples data{to_values(F, b.size(), "boundary data")};
        return py::array(py::cast(evaluate_points(to_points(pts), [&](const UnitVector& p) {
            return dirichlet_solve_cap(b, data, p.vec());
        })));
    }, py::arg("center"), py::arg("radius"), py::arg("boundary_values"), py::arg("points"),
       "Harmonic extension of values given at the nodes of boundary_grid(center, radius, len(boundary_values)).");

    m.def("neumann_solve", [](const std::array<double, 3>& c, double rho, const Array& F, double mean, const Array& pts) {
        const QuadratureGrid b = build_boundary_grid(make_cap(c, rho), static_cast<std::size_t>(F.size()));
        const ScalarSamples data{to_values(F, b.size(), "boundary data")};
        return py::array(py::cast(evaluate_points(to_points(pts), [&](const UnitVector& p) {
            return neumann_solve_cap(b, data, mean, p.vec());
        })));
    }, py::arg("center"), py::arg("radius"), py::arg("normal_derivatives"), py::arg("mean"), py::arg("points"));

    m.def("random_vortices", [](const std::array<double, 3>& c, double rho, std::size_t N, std::uint64_t seed) {
        const VortexSet v = random_vortices(make_cap(c, rho), N, seed);
        py::dict d;
        d["centers"] = from_points(v.centers);
        d["strengths"] = py::array(py::cast(v.strengths));
        return d;
    }, py::arg("center"), py::arg("radius"), py::arg("N"), py::arg("seed"));

    m.def("vortex_mfs", [](const std::array<double, 3>& c, double rho, std::size_t N, std::uint64_t seed, std::size_t M,
                           double rho_bar, double lambda, const Array& pts, std::size_t collocation) {
        const SphericalCap cap = make_cap(c, rho);
        return report_dict(vortex_mfs(cap, random_vortices(cap, N, seed), M, rho_bar, lambda, to_points(pts), 1.0, collocation));
    }, py::arg("center"), py::arg("radius"), py::arg("N"), py::arg("seed"), py::arg("M"), py::arg("rho_bar"),
       py::arg("lambda_") = 1e-12, py::arg("points"), py::arg("collocation") = 0);

    m.def("vd_round_trip", [](const std::array<double, 3>& c, double rho, std::size_t n_t, std::size_t n_phi, int J,
                              std::uint64_t seed, int n_min, int n_max, const Array& pts) {
        const QuadratureGrid g = build_cap_grid(make_cap(c, rho), n_t, n_phi);
        const ShCoefficients T = synth_field(seed, n_min, n_max);
        const ForwardSamples fw = vd_forward(T, g);
        return report_dict(vd_reconstruct(g, fw.field, J, cap_mean(g, fw.potential), to_points(pts), {},
                                          ScalarField([&](const Vec3& x) { return sh_eval(T, x); })));
    }, py::arg("center"), py::arg("radius"), py::arg("n_t"), py::arg("n_phi"), py::arg("J"), py::arg("seed"),
       py::arg("n_min"), py::arg("n_max"), py::arg("points"));

    m.def("load_field_csv", [](const std::string& path) {
        const FieldTable t = load_field_csv(path);
        py::dict d;
        d["lon_deg"] = py::array(py::cast(t.lon_deg));
        d["lat_deg"] = py::array(py::cast(t.lat_deg));
        if (t.schema == CsvSchema::scalar) {
            d["values"] = py::array(py::cast(t.values));
        } else {
            d["vectors"] = from_vectors(t.vectors);
        }
        return d;
    }, py::arg("path"));
    m.def("save_field_csv", [](const std::string& path, const Array& pts, const Array& values) {
        const auto nodes = to_points(pts);
        if (values.ndim() == 2) {
            if (values.shape(0) != static_cast<py::ssize_t>(nodes.size()) || values.shape(1) != 3) {
                throw ValidationError("vectors must have shape (n, 3)");
            }
            const auto r = values.unchecked<2>();
            std::vector<Vec3> v;
            for (py::ssize_t i = 0; i < r.shape(0); ++i) v.push_back({r(i, 0), r(i, 1), r(i, 2)});
            save_field_csv(path, make_table(nodes, v));
            return;
        }
        save_field_csv(path, make_table(nodes, to_values(values, nodes.size(), "values")));
    }, py::arg("path"), py::arg("points"), py::arg("values"));

    m.def("run", [](const std::map<std::string, std::string>& settings) {
        RunConfig c;
        for (const auto& [k, v] : settings) apply_setting(c, k, v);
        std::ostringstream log;
        const int code = run(c, log);
        return py::make_tuple(code, log.str());
    }, py::arg("settings"), "Runs a command from key=value settings; returns (exit_code, log).");

    std::vector<std::string> commands(kCommands.begin(), kCommands.end());
    m.attr("COMMANDS") = commands;
}
