#include "sphaerica/decomposition.hpp"

#include <cmath>

#include "sphaerica/errors.hpp"
#include "sphaerica/kernels.hpp"
#include "sphaerica/parallel.hpp"

namespace sphaerica {

namespace {

void require_sphere(const QuadratureGrid& g, std::size_t n, const char* who) {
    if (g.kind != GridKind::sphere_area) throw ValidationError(std::string(who) + ": needs a sphere grid");
    if (n != g.size()) throw ValidationError(std::string(who) + ": sample count does not match the grid");
}

void remove_mean(const QuadratureGrid& g, std::vector<double>& v) {
    const double mean = integrate(g, ScalarSamples{v}) / g.total_weight();
    for (double& x : v) x -= mean;
}

VectorSamples tangential_part(const QuadratureGrid& g, const VectorSamples& f) {
    VectorSamples t;
    t.tangential = true;
    t.values.resize(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) t.values[i] = project_tangent(f.values[i], g.nodes[i].vec());
    return t;
}

std::vector<double> at_nodes(const QuadratureGrid& g, const ShCoefficients& c) {
    std::vector<double> out(g.size());
    parallel_for(g.size(), [&](std::size_t i) { out[i] = sh_eval(c, g.nodes[i]); });
    return out;
}

ShCoefficients minus(const ShCoefficients& a, const ShCoefficients& b) { return a + (-1.0) * b; }

}  // namespace

Vec3 helmholtz_compose(const Vec3& xi, double F1, const Vec3& grad_F2, const Vec3& grad_F3) {
    return F1 * xi + project_tangent(grad_F2, xi) + cross(xi, project_tangent(grad_F3, xi));
}

Vec3 helmholtz_compose(const HelmholtzCoefficients& c, const Vec3& xi) {
    return sh_eval(c.F1, xi) * xi + sh_grad_eval(c.F2, xi) + sh_curl_eval(c.F3, xi);
}

HelmholtzScalars helmholtz_decompose_sphere(const QuadratureGrid& sphere_grid, const VectorSamples& f, int J) {
    require_sphere(sphere_grid, f.size(), "helmholtz_decompose_sphere");
    const std::size_t n = sphere_grid.size();
    const VectorSamples ft = tangential_part(sphere_grid, f);
    HelmholtzScalars s;
    s.points = sphere_grid.nodes;
    s.F1.resize(n);
    s.F2.resize(n);
    s.F3.resize(n);
    parallel_for(n, [&](std::size_t i) {
        const Vec3& xi = sphere_grid.nodes[i].vec();
        s.F1[i] = dot(xi, f.values[i]);
        const TangentJet jet = estimate_jet(sphere_grid, ft, i);
        s.F2[i] = invert_gradient(sphere_grid, ft, Deriv::grad, J, xi, jet);
        s.F3[i] = invert_gradient(sphere_grid, ft, Deriv::curl, J, xi, jet);
    });
    remove_mean(sphere_grid, s.F2);
    remove_mean(sphere_grid, s.F3);
    s.normalization = "sphere: mean(F2) = mean(F3) = 0";
    return s;
}

HelmholtzCoefficients helmholtz_coefficients(const QuadratureGrid& sphere_grid, const HelmholtzScalars& s,
                                             int max_degree) {
    require_sphere(sphere_grid, s.F1.size(), "helmholtz_coefficients");
    return {sh_analyze(sphere_grid, ScalarSamples{s.F1}, max_degree), sh_analyze(sphere_grid, ScalarSamples{s.F2}, max_degree),
            sh_analyze(sphere_grid, ScalarSamples{s.F3}, max_degree)};
}

HelmholtzScalars helmholtz_decompose_cap(const QuadratureGrid& cap_grid, const VectorSamples& f,
                                         const QuadratureGrid& boundary_grid,
                                         const std::optional<ScalarSamples>& F3_boundary, int J,
                                         const std::vector<UnitVector>& points) {
    if (cap_grid.kind != GridKind::cap_area || !cap_grid.cap) throw ValidationError("helmholtz_decompose_cap: needs a cap grid");
    if (boundary_grid.kind != GridKind::boundary_line || !boundary_grid.cap) {
        throw ValidationError("helmholtz_decompose_cap: needs a boundary grid");
    }
    const SphericalCap& cap = *cap_grid.cap;
    const SphericalCap& bcap = *boundary_grid.cap;
    if (norm(cap.center().vec() - bcap.center().vec()) > 1e-14 || cap.radius() != bcap.radius()) {
        throw ValidationError("helmholtz_decompose_cap: area and boundary grids belong to different caps");
    }
    if (f.size() != cap_grid.size()) throw ValidationError("helmholtz_decompose_cap: sample count does not match the grid");
    if (F3_boundary && F3_boundary->size() != boundary_grid.size()) {
        throw ValidationError("helmholtz_decompose_cap: boundary data does not match the boundary grid");
    }
    if (J < 0 || J > 52) throw ValidationError("regularization scale J must lie in [0, 52]");
    const bool at_nodes_mode = points.empty();
    const std::vector<UnitVector>& where = at_nodes_mode ? cap_grid.nodes : points;
    for (const auto& p : where) {
        if (!cap.contains(p)) throw ValidationError("helmholtz_decompose_cap: evaluation point outside the cap");
    }
    const std::vector<double> zero(boundary_grid.size(), 0.0);
    const std::vector<double>& F = F3_boundary ? F3_boundary->values : zero;

    HelmholtzScalars s;
    s.points = where;
    s.F2.resize(where.size());
    s.F3.resize(where.size());
    parallel_for(where.size(), [&](std::size_t k) {
        const Vec3& xi = where[k].vec();
        const double area2 = weighted_sum(cap_grid.weights, [&](std::size_t i) {
            return dot(neumann_green_regularized_deriv(cap, xi, cap_grid.nodes[i], J, Deriv::grad), f.values[i]);
        });
        const double area3 = weighted_sum(cap_grid.weights, [&](std::size_t i) {
            return dot(dirichlet_green_regularized_deriv(cap, xi, cap_grid.nodes[i], J, Deriv::curl), f.values[i]);
        });
        const double line2 = weighted_sum(boundary_grid.weights, [&](std::size_t i) {
            const BoundaryPoint& b = boundary_grid.frames[i];
            return F[i] * dot(b.tangent, neumann_green_deriv(cap, xi, b.position, Deriv::grad));
        });
        // G_D vanishes on the boundary, so its τ·f term drops out; only the data term remains.
        const double line3 = weighted_sum(boundary_grid.weights, [&](std::size_t i) {
            return F[i] * dirichlet_green_normal(cap, xi, boundary_grid.frames[i]);
        });
        s.F2[k] = -area2 + line2;
        s.F3[k] = -area3 + line3;
    });
    if (at_nodes_mode) {
        s.F1.resize(where.size());
        for (std::size_t i = 0; i < where.size(); ++i) s.F1[i] = dot(where[i].vec(), f.values[i]);
    }
    s.normalization = F3_boundary ? "cap: mean(F2) = 0, F3 = given data on the boundary"
                                  : "cap: mean(F2) = 0, F3 = 0 on the boundary";
    return s;
}

ShCoefficients d_apply(const ShCoefficients& c, int power) {
    if (power != 1 && power != -1) throw ValidationError("d_apply: power must be +1 or -1");
    return sh_scale_degrees(c, [power](int n) { return power == 1 ? n + 0.5 : 1.0 / (n + 0.5); });
}

double d_inv_convolve(const QuadratureGrid& sphere_grid, const ScalarSamples& F, const Vec3& xi, double F_at_xi) {
    return d_inv_convolve(sphere_grid, F, xi, LocalJet{F_at_xi, Vec3{}});
}

double d_inv_convolve(const QuadratureGrid& sphere_grid, const ScalarSamples& F, const Vec3& xi, const LocalJet& jet) {
    require_sphere(sphere_grid, F.size(), "d_inv_convolve");
    const Vec3 g = project_tangent(jet.gradient, xi);
    const double quad = weighted_sum(sphere_grid.weights, [&](std::size_t i) {
        const Vec3& eta = sphere_grid.nodes[i].vec();
        const double t = dot(xi, eta);
        const double gap = 1.0 - t;
        if (gap < kSingularityGuard) return 0.0;
        return (F.values[i] - jet.value - dot(g, eta - t * xi)) / (2.0 * kPi * std::sqrt(2.0 * gap));
    });
    return quad + 2.0 * jet.value;
}

HardyHodgeScalars hardy_hodge_decompose_sphere(const QuadratureGrid& sphere_grid, const VectorSamples& f, int J,
                                               DInversePath path, int max_degree) {
    const HelmholtzScalars h = helmholtz_decompose_sphere(sphere_grid, f, J);
    const std::size_t n = sphere_grid.size();
    std::vector<double> d1(n), d2(n);
    if (path == DInversePath::spectral) {
        if (max_degree < 0 || max_degree > kMaxShDegree) throw ValidationError("hardy_hodge: max_degree out of range");
        d1 = at_nodes(sphere_grid, d_apply(sh_analyze(sphere_grid, ScalarSamples{h.F1}, max_degree), -1));
        d2 = at_nodes(sphere_grid, d_apply(sh_analyze(sphere_grid, ScalarSamples{h.F2}, max_degree), -1));
    } else {
        const ScalarSamples s1{h.F1}, s2{h.F2};
        parallel_for(n, [&](std::size_t i) {
            const Vec3& xi = sphere_grid.nodes[i].vec();
            d1[i] = d_inv_convolve(sphere_grid, s1, xi, estimate_jet(sphere_grid, s1, i));
            d2[i] = d_inv_convolve(sphere_grid, s2, xi, estimate_jet(sphere_grid, s2, i));
        });
    }
    HardyHodgeScalars r;
    r.points = h.points;
    r.F1.resize(n);
    r.F2.resize(n);
    r.F3 = h.F3;
    for (std::size_t i = 0; i < n; ++i) {
        const double common = 0.5 * d1[i] + 0.25 * d2[i];
        r.F1[i] = common - 0.5 * h.F2[i];
        r.F2[i] = common + 0.5 * h.F2[i];
    }
    return r;
}

Vec3 hardy_hodge_compose(const HardyHodgeCoefficients& c, const Vec3& xi) {
    const double radial = sh_eval(d_apply(c.F1, 1) + 0.5 * c.F1, xi) + sh_eval(minus(d_apply(c.F2, 1), 0.5 * c.F2), xi);
    return radial * xi - sh_grad_eval(c.F1, xi) + sh_grad_eval(c.F2, xi) + sh_curl_eval(c.F3, xi);
}

HelmholtzCoefficients hardy_hodge_to_helmholtz(const HardyHodgeCoefficients& c) {
    return {d_apply(c.F1, 1) + 0.5 * c.F1 + minus(d_apply(c.F2, 1), 0.5 * c.F2), minus(c.F2, c.F1), c.F3};
}

}  // namespace sphaerica
