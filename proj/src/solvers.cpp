#include "sphaerica/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "sphaerica/errors.hpp"
#include "sphaerica/parallel.hpp"

namespace sphaerica {

namespace {

void require_area_grid(const QuadratureGrid& grid, const char* who) {
    if (grid.kind == GridKind::boundary_line) throw ValidationError(std::string(who) + ": needs a cap or sphere grid");
}

void require_boundary_grid(const QuadratureGrid& grid, const char* who) {
    if (grid.kind != GridKind::boundary_line || !grid.cap) {
        throw ValidationError(std::string(who) + ": needs a cap boundary grid");
    }
}

void require_size(const QuadratureGrid& grid, std::size_t n, const char* who) {
    if (n != grid.size()) throw ValidationError(std::string(who) + ": sample count does not match the grid");
}

void require_scale(int J) {
    if (J < 0 || J > 52) throw ValidationError("regularization scale J must lie in [0, 52]");
}

struct JetFit {
    Vec3 e1, e2;
    Eigen::MatrixXd coeffs;  // rows: 1, u, v, u², uv, v², u³, u²v, uv², v³
};

// Cubic least squares over the 5×5 block of product-grid nodes around `node`.
template <class Value>
JetFit fit_jet(const QuadratureGrid& grid, std::size_t node, int components, Value&& value) {
    if (grid.kind != GridKind::sphere_area || grid.n_t * grid.n_phi != grid.size()) {
        throw ValidationError("estimate_jet: needs a product sphere grid");
    }
    if (node >= grid.size()) throw ValidationError("estimate_jet: node index out of range");
    const auto n_t = static_cast<long>(grid.n_t), n_phi = static_cast<long>(grid.n_phi);
    const long ring = static_cast<long>(node) / n_phi, col = static_cast<long>(node) % n_phi;
    const Vec3& xi = grid.nodes[node].vec();
    const RotationFrame frame = rotation_to_pole(grid.nodes[node]);
    std::vector<std::size_t> idx;
    for (long dr = -2; dr <= 2; ++dr) {
        const long r = ring + dr;
        if (r < 0 || r >= n_t) continue;
        for (long dc = -2; dc <= 2; ++dc) idx.push_back(static_cast<std::size_t>(r * n_phi + ((col + dc) % n_phi + n_phi) % n_phi));
    }
    double scale = 0.0;
    for (std::size_t k : idx) scale = std::max(scale, norm(grid.nodes[k].vec() - xi));
    if (scale == 0.0) throw NumericalError("estimate_jet: degenerate neighbourhood");
    Eigen::MatrixXd A(static_cast<Eigen::Index>(idx.size()), 10);
    Eigen::MatrixXd b(static_cast<Eigen::Index>(idx.size()), components);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const Vec3& eta = grid.nodes[idx[r]].vec();
        const double u = dot(frame.e1(), eta) / scale, v = dot(frame.e2(), eta) / scale;
        const auto row = static_cast<Eigen::Index>(r);
        A.row(row) << 1, u, v, u * u, u * v, v * v, u * u * u, u * u * v, u * v * v, v * v * v;
        for (int c = 0; c < components; ++c) b(row, c) = value(idx[r], c);
    }
    JetFit fit{frame.e1(), frame.e2(), A.colPivHouseholderQr().solve(b)};
    fit.coeffs.row(1) /= scale;
    fit.coeffs.row(2) /= scale;
    return fit;
}

}  // namespace

LocalJet estimate_jet(const QuadratureGrid& sphere_grid, const ScalarSamples& H, std::size_t node) {
    require_size(sphere_grid, H.size(), "estimate_jet");
    const JetFit fit = fit_jet(sphere_grid, node, 1, [&](std::size_t k, int) { return H.values[k]; });
    return {H.values[node], fit.coeffs(1, 0) * fit.e1 + fit.coeffs(2, 0) * fit.e2};
}

TangentJet estimate_jet(const QuadratureGrid& sphere_grid, const VectorSamples& f, std::size_t node) {
    require_size(sphere_grid, f.size(), "estimate_jet");
    const JetFit fit = fit_jet(sphere_grid, node, 3, [&](std::size_t k, int c) {
        const Vec3& v = f.values[k];
        return c == 0 ? v.x : (c == 1 ? v.y : v.z);
    });
    const auto col = [&](int row) { return Vec3{fit.coeffs(row, 0), fit.coeffs(row, 1), fit.coeffs(row, 2)}; };
    return {f.values[node], fit.e1, fit.e2, col(1), col(2)};
}

std::vector<double> evaluate_points(const std::vector<UnitVector>& probes,
                                    const std::function<double(const UnitVector&)>& f) {
    std::vector<double> out(probes.size());
    parallel_for(probes.size(), [&](std::size_t i) { out[i] = f(probes[i]); });
    return out;
}

int default_scale(const QuadratureGrid& grid) {
    require_area_grid(grid, "default_scale");
    const double theta_max = grid.cap ? std::acos(1.0 - grid.cap->radius()) : kPi;
    const double h = theta_max / static_cast<double>(grid.n_t);
    return static_cast<int>(std::ceil(std::log2(1.0 / h))) + 2;
}

double surface_potential(const QuadratureGrid& grid, const ScalarSamples& H, const Vec3& xi, int J) {
    require_area_grid(grid, "surface_potential");
    require_size(grid, H.size(), "surface_potential");
    require_scale(J);
    return weighted_sum(grid.weights, [&](std::size_t i) {
        return fundamental_regularized(dot(xi, grid.nodes[i].vec()), J) * H.values[i];
    });
}

double surface_potential(const QuadratureGrid& grid, const ScalarSamples& H, const Vec3& xi, int J, const LocalJet& jet) {
    if (grid.kind != GridKind::sphere_area) throw ValidationError("surface_potential: subtraction needs a sphere grid");
    require_size(grid, H.size(), "surface_potential");
    require_scale(J);
    const Vec3 g = project_tangent(jet.gradient, xi);
    return weighted_sum(grid.weights, [&](std::size_t i) {
        const Vec3& eta = grid.nodes[i].vec();
        const double t = dot(xi, eta);
        return fundamental_regularized(t, J) * (H.values[i] - jet.value - dot(g, eta - t * xi));
    });
}

double beltrami_fd(const ScalarField& F, const Vec3& xi, double h) {
    if (!(h >= 1e-4 && h <= 1e-2)) throw ValidationError("beltrami_fd: step must lie in [1e-4, 1e-2]");
    const RotationFrame frame = rotation_to_pole(UnitVector(xi));
    const double c = std::cos(h), s = std::sin(h);
    const double sum = F(c * xi + s * frame.e1()) + F(c * xi - s * frame.e1()) + F(c * xi + s * frame.e2()) +
                       F(c * xi - s * frame.e2());
    return (sum - 4.0 * F(xi)) / (h * h);
}

double poisson_solve_cap(const QuadratureGrid& cap_grid, const ScalarSamples& H, const Vec3& xi_bar, const Vec3& xi,
                         int J) {
    if (cap_grid.kind != GridKind::cap_area || !cap_grid.cap) throw ValidationError("poisson_solve_cap: needs a cap grid");
    require_size(cap_grid, H.size(), "poisson_solve_cap");
    const SphericalCap& cap = *cap_grid.cap;
    if (cap.gap(xi_bar) <= cap.radius()) throw ValidationError("poisson_solve_cap: auxiliary point must lie outside the closed cap");
    if (!cap.contains(xi)) throw ValidationError("poisson_solve_cap: evaluation point outside the cap");
    const double total = integrate(cap_grid, H);
    const double area = cap_metrics(cap).area;
    const double mean = total / area;
    ScalarSamples centered = H;
    for (double& v : centered.values) v -= mean;
    return surface_potential(cap_grid, centered, xi, J) - std::log(1.0 - dot(xi, xi_bar)) * total / area;
}

double dirichlet_solve_cap(const QuadratureGrid& boundary_grid, const ScalarSamples& F, const Vec3& xi) {
    require_boundary_grid(boundary_grid, "dirichlet_solve_cap");
    require_size(boundary_grid, F.size(), "dirichlet_solve_cap");
    const SphericalCap& cap = *boundary_grid.cap;
    if (!cap.contains_strictly(xi, kDirichletMargin)) {
        throw ValidationError("dirichlet_solve_cap: point too close to the boundary or outside the cap");
    }
    const double rho = cap.radius();
    const double factor = (dot(xi, cap.center().vec()) + rho - 1.0) / (2.0 * kPi * cap.boundary_radius());
    return factor * weighted_sum(boundary_grid.weights, [&](std::size_t i) {
        return F.values[i] / (1.0 - dot(xi, boundary_grid.nodes[i].vec()));
    });
}

double neumann_solve_cap(const QuadratureGrid& boundary_grid, const ScalarSamples& F, double mean_value, const Vec3& xi) {
    require_boundary_grid(boundary_grid, "neumann_solve_cap");
    require_size(boundary_grid, F.size(), "neumann_solve_cap");
    const SphericalCap& cap = *boundary_grid.cap;
    const double flux = integrate(boundary_grid, F);
    if (std::abs(flux) > kNeumannCompatibilityTol) {
        throw ValidationError("neumann_solve_cap: boundary data violates the compatibility condition (integral " +
                              std::to_string(flux) + ")");
    }
    if (!cap.contains_strictly(xi, kDirichletMargin)) {
        throw ValidationError("neumann_solve_cap: point too close to the boundary or outside the cap");
    }
    const double rho = cap.radius();
    const double shift = (1.0 - rho) / (2.0 * kPi * rho) * std::log(2.0 - rho);
    return mean_value - weighted_sum(boundary_grid.weights, [&](std::size_t i) {
        const double g = std::log(1.0 - dot(xi, boundary_grid.nodes[i].vec())) / (2.0 * kPi) + shift;
        return g * F.values[i];
    });
}

double invert_gradient(const QuadratureGrid& grid, const VectorSamples& f, Deriv mode, int J, const Vec3& xi) {
    require_area_grid(grid, "invert_gradient");
    require_tangential(grid, f);
    require_scale(J);
    if (grid.kind == GridKind::cap_area) {
        const SphericalCap& cap = *grid.cap;
        return -weighted_sum(grid.weights, [&](std::size_t i) {
            return dot(neumann_green_regularized_deriv(cap, xi, grid.nodes[i], J, mode), f.values[i]);
        });
    }
    return -weighted_sum(grid.weights, [&](std::size_t i) {
        return dot(fundamental_regularized_deriv(xi, grid.nodes[i], J, mode), f.values[i]);
    });
}

double invert_gradient(const QuadratureGrid& grid, const VectorSamples& f, Deriv mode, int J, const Vec3& xi,
                       const TangentJet& jet) {
    if (grid.kind != GridKind::sphere_area) throw ValidationError("invert_gradient: subtraction needs a sphere grid");
    require_tangential(grid, f);
    require_scale(J);
    const double quad = weighted_sum(grid.weights, [&](std::size_t i) {
        const Vec3& eta = grid.nodes[i].vec();
        const Vec3 model = jet.value + dot(jet.e1, eta) * jet.d1 + dot(jet.e2, eta) * jet.d2;
        return dot(fundamental_regularized_deriv(xi, eta, J, mode), f.values[i] - model);
    });
    const double exact = mode == Deriv::grad ? (dot(jet.e1, jet.d1) + dot(jet.e2, jet.d2)) / 6.0
                                             : -0.5 * (dot(jet.e1, jet.d2) - dot(jet.e2, jet.d1));
    return -quad - exact;
}

double mvp_residual(const ScalarField& F, const SphericalCap& probe_cap, MeanValueKind which, std::size_t n_t,
                    std::size_t n_phi, std::size_t m) {
    const double rho = probe_cap.radius();
    const QuadratureGrid boundary = build_boundary_grid(probe_cap, m);
    const double line = weighted_sum(boundary.weights, [&](std::size_t i) { return F(boundary.nodes[i]); });
    const double center = F(probe_cap.center());
    if (which == MeanValueKind::boundary) {
        return std::abs(center - line / (2.0 * kPi * probe_cap.boundary_radius()));
    }
    const QuadratureGrid area = build_cap_grid(probe_cap, n_t, n_phi);
    const double surf = weighted_sum(area.weights, [&](std::size_t i) { return F(area.nodes[i]); });
    return std::abs(center - surf / (4.0 * kPi) - std::sqrt(2.0 - rho) / (4.0 * kPi * std::sqrt(rho)) * line);
}

bool max_principle_check(const ScalarField& F, const SphericalCap& cap, std::size_t n_t, std::size_t n_phi,
                         std::size_t m) {
    const QuadratureGrid area = build_cap_grid(cap, n_t, n_phi);
    const QuadratureGrid boundary = build_boundary_grid(cap, m);
    double inner = -INFINITY, outer = -INFINITY;
    for (const auto& p : area.nodes) inner = std::max(inner, F(p));
    for (const auto& p : boundary.nodes) outer = std::max(outer, F(p));
    return inner <= outer + 1e-12;
}

}  // namespace sphaerica
