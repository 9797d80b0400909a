#include "sphaerica/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sphaerica/errors.hpp"

namespace sphaerica {

double QuadratureGrid::total_weight() const { return pairwise_sum(weights); }

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kLeaf = 16;
    if (values.size() <= kLeaf) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

GaussLegendre gauss_legendre(std::size_t n) {
    if (n == 0) throw ValidationError("gauss_legendre: need at least one node");
    GaussLegendre gl;
    gl.nodes.assign(n, 0.0);
    gl.weights.assign(n, 0.0);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            if (n == 1) p0 = 1.0;
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        dp = (n == 1) ? 1.0 : static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        gl.nodes[i] = -x;
        gl.nodes[n - 1 - i] = x;
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) gl.nodes[n / 2] = 0.0;
    return gl;
}

namespace {

QuadratureGrid product_grid(const RotationFrame& frame, double t_lo, std::size_t n_t, std::size_t n_phi) {
    const GaussLegendre gl = gauss_legendre(n_t);
    const double half = 0.5 * (1.0 - t_lo);
    const double mid = 0.5 * (1.0 + t_lo);
    const double dphi = 2.0 * kPi / static_cast<double>(n_phi);
    QuadratureGrid g;
    g.n_t = n_t;
    g.n_phi = n_phi;
    g.nodes.reserve(n_t * n_phi);
    g.weights.reserve(n_t * n_phi);
    for (std::size_t i = 0; i < n_t; ++i) {
        const double t = mid + half * gl.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        const double w = half * gl.weights[i] * dphi;
        for (std::size_t j = 0; j < n_phi; ++j) {
            const double phi = dphi * static_cast<double>(j);
            g.nodes.emplace_back(frame.apply({s * std::cos(phi), s * std::sin(phi), t}));
            g.weights.push_back(w);
        }
    }
    return g;
}

void check_product_sizes(std::size_t n_t, std::size_t n_phi) {
    if (n_t < 2 || n_phi < 4) {
        throw ValidationError("quadrature grid needs n_t >= 2 and n_phi >= 4 (got " + std::to_string(n_t) + ", " +
                              std::to_string(n_phi) + ")");
    }
}

}  // namespace

QuadratureGrid build_cap_grid(const SphericalCap& cap, std::size_t n_t, std::size_t n_phi) {
    check_product_sizes(n_t, n_phi);
    QuadratureGrid g = product_grid(rotation_to_pole(cap.center()), 1.0 - cap.radius(), n_t, n_phi);
    g.kind = GridKind::cap_area;
    g.cap = cap;
    return g;
}

QuadratureGrid build_sphere_grid(std::size_t n_t, std::size_t n_phi) {
    check_product_sizes(n_t, n_phi);
    RotationFrame identity{{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}}};
    QuadratureGrid g = product_grid(identity, -1.0, n_t, n_phi);
    g.kind = GridKind::sphere_area;
    return g;
}

QuadratureGrid build_sphere_grid(std::size_t n_t, std::size_t n_phi, const UnitVector& pole, int grading) {
    check_product_sizes(n_t, n_phi);
    if (grading < 1 || grading > 6) throw ValidationError("build_sphere_grid: grading exponent must lie in [1, 6]");
    const GaussLegendre gl = gauss_legendre(n_t);
    const RotationFrame frame = rotation_to_pole(pole);
    const double dphi = 2.0 * kPi / static_cast<double>(n_phi);
    QuadratureGrid g;
    g.kind = GridKind::sphere_area;
    g.n_t = n_t;
    g.n_phi = n_phi;
    g.nodes.reserve(n_t * n_phi);
    g.weights.reserve(n_t * n_phi);
    for (std::size_t i = 0; i < n_t; ++i) {
        const double v = 0.5 * (1.0 + gl.nodes[i]);
        const double u = 2.0 * std::pow(v, grading);
        const double t = 1.0 - u;
        const double s = std::sqrt(std::max(0.0, u * (2.0 - u)));
        const double w = 0.5 * gl.weights[i] * 2.0 * grading * std::pow(v, grading - 1) * dphi;
        for (std::size_t j = 0; j < n_phi; ++j) {
            const double phi = dphi * static_cast<double>(j);
            g.nodes.emplace_back(frame.apply({s * std::cos(phi), s * std::sin(phi), t}));
            g.weights.push_back(w);
        }
    }
    return g;
}

QuadratureGrid build_boundary_grid(const SphericalCap& cap, std::size_t m) {
    if (m < 8) throw ValidationError("build_boundary_grid: need m >= 8");
    const RotationFrame frame = rotation_to_pole(cap.center());
    const double w = 2.0 * kPi * cap.boundary_radius() / static_cast<double>(m);
    QuadratureGrid g;
    g.kind = GridKind::boundary_line;
    g.cap = cap;
    g.m = m;
    g.nodes.reserve(m);
    g.frames.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
        g.frames.push_back(boundary_frame(cap, frame, phi));
        g.nodes.push_back(g.frames.back().position);
        g.weights.push_back(w);
    }
    return g;
}

ScalarSamples sample(const QuadratureGrid& grid, const std::function<double(const UnitVector&)>& f) {
    ScalarSamples s;
    s.values.reserve(grid.size());
    for (const auto& node : grid.nodes) s.values.push_back(f(node));
    return s;
}

VectorSamples sample_vector(const QuadratureGrid& grid, const std::function<Vec3(const UnitVector&)>& f,
                            bool tangential) {
    VectorSamples s;
    s.tangential = tangential;
    s.values.reserve(grid.size());
    for (const auto& node : grid.nodes) s.values.push_back(f(node));
    return s;
}

void require_tangential(const QuadratureGrid& grid, const VectorSamples& f, double tol) {
    if (f.size() != grid.size()) throw ValidationError("vector samples do not match the grid size");
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::abs(dot(f.values[i], grid.nodes[i].vec())) > tol) {
            throw ValidationError("vector field is not tangential at node " + std::to_string(i));
        }
    }
}

double integrate(const QuadratureGrid& grid, const ScalarSamples& samples) {
    if (samples.size() != grid.size()) {
        throw ValidationError("integrate: " + std::to_string(samples.size()) + " samples for a grid of " +
                              std::to_string(grid.size()) + " nodes");
    }
    return weighted_sum(grid.weights, [&](std::size_t i) { return samples.values[i]; });
}

Vec3 integrate(const QuadratureGrid& grid, const VectorSamples& samples) {
    if (samples.size() != grid.size()) {
        throw ValidationError("integrate: " + std::to_string(samples.size()) + " samples for a grid of " +
                              std::to_string(grid.size()) + " nodes");
    }
    return weighted_sum_vec(grid.weights, [&](std::size_t i) { return samples.values[i]; });
}

}  // namespace sphaerica
