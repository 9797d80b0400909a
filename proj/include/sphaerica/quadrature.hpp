#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sphaerica/geometry.hpp"

namespace sphaerica {

enum class GridKind { cap_area, sphere_area, boundary_line };

/// Nodes and positive weights for integration over a cap, the whole sphere,
/// or the boundary curve of a cap. Boundary grids also carry the local frames.
struct QuadratureGrid {
    GridKind kind = GridKind::sphere_area;
    std::optional<SphericalCap> cap;
    std::vector<UnitVector> nodes;
    std::vector<double> weights;
    std::vector<BoundaryPoint> frames;  ///< boundary_line only, co-indexed with nodes
    std::size_t n_t = 0;
    std::size_t n_phi = 0;
    std::size_t m = 0;

    std::size_t size() const { return nodes.size(); }
    double total_weight() const;
};

/// Values co-indexed with the nodes of a QuadratureGrid.
template <class T>
struct FieldSamples {
    std::vector<T> values;
    bool tangential = false;  ///< meaningful for vector fields only

    std::size_t size() const { return values.size(); }
    const T& operator[](std::size_t i) const { return values[i]; }
};

using ScalarSamples = FieldSamples<double>;
using VectorSamples = FieldSamples<Vec3>;

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussLegendre gauss_legendre(std::size_t n);

QuadratureGrid build_cap_grid(const SphericalCap& cap, std::size_t n_t, std::size_t n_phi);
QuadratureGrid build_sphere_grid(std::size_t n_t, std::size_t n_phi);

/// Sphere grid in polar coordinates about `pole` with nodes graded toward it:
/// 1 − η·pole = 2vᵖ, v Gauss-Legendre on [0, 1]. For integrands with a
/// logarithmic singularity at the pole, p = 3 already gives ~1e-11 at n_t = 64.
QuadratureGrid build_sphere_grid(std::size_t n_t, std::size_t n_phi, const UnitVector& pole, int grading);
QuadratureGrid build_boundary_grid(const SphericalCap& cap, std::size_t m);

ScalarSamples sample(const QuadratureGrid& grid, const std::function<double(const UnitVector&)>& f);
VectorSamples sample_vector(const QuadratureGrid& grid, const std::function<Vec3(const UnitVector&)>& f,
                            bool tangential);

/// Throws ValidationError if some |v_i · ξ_i| exceeds `tol`.
void require_tangential(const QuadratureGrid& grid, const VectorSamples& f, double tol = 1e-10);

/// Σ w_i v_i with pairwise summation in fixed index order.
double integrate(const QuadratureGrid& grid, const ScalarSamples& samples);
Vec3 integrate(const QuadratureGrid& grid, const VectorSamples& samples);

/// Fixed-order pairwise (tree) summation.
double pairwise_sum(std::span<const double> values);

/// Σ w_i term(i), pairwise-summed in index order. Every kernel integral goes through this.
template <class Term>
double weighted_sum(std::span<const double> weights, Term&& term) {
    std::vector<double> buffer(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) buffer[i] = weights[i] * term(i);
    return pairwise_sum(buffer);
}

/// Vector-valued counterpart of weighted_sum.
template <class Term>
Vec3 weighted_sum_vec(std::span<const double> weights, Term&& term) {
    std::vector<double> bx(weights.size()), by(weights.size()), bz(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const Vec3 v = weights[i] * term(i);
        bx[i] = v.x;
        by[i] = v.y;
        bz[i] = v.z;
    }
    return {pairwise_sum(bx), pairwise_sum(by), pairwise_sum(bz)};
}

}  // namespace sphaerica
