#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "sphaerica/geometry.hpp"
#include "sphaerica/quadrature.hpp"

namespace sphaerica {

/// Layer density on the nodes of a cap boundary grid.
struct DensitySamples {
    std::shared_ptr<const QuadratureGrid> grid;
    std::vector<double> values;
    bool mean_free = false;

    std::size_t size() const { return values.size(); }
};

inline constexpr double kMeanFreeTol = 1e-10;

/// Validates sizes and, when `mean_free` is set, |Σ wᵢQᵢ| < 1e-10.
DensitySamples make_density(std::shared_ptr<const QuadratureGrid> boundary_grid, std::vector<double> values,
                            bool mean_free = false);

/// Σ wᵢ G(ξ·ηᵢ) Q̃ᵢ. Throws ValidationError when ξ is within one node spacing of the curve.
double single_layer(const DensitySamples& q, const Vec3& xi);

/// Σ wᵢ ∂G/∂ν(ηᵢ) Qᵢ, same distance guard.
double double_layer(const DensitySamples& q, const Vec3& xi);

/// Geodesic curvature over 4π: the analytic diagonal of the double-layer kernel.
double double_layer_diagonal(const SphericalCap& cap);

/// Unweighted m×m double-layer kernel K_ij = ∂G/∂ν(η_j)(ξ_i·η_j) on the boundary
/// nodes, row-major, with the analytic diagonal.
std::vector<double> double_layer_kernel_matrix(const QuadratureGrid& boundary_grid);

/// Direct values on the curve (principal parts, without the ±Q/2 jumps).
std::vector<double> double_layer_on_boundary(const DensitySamples& q);
std::vector<double> single_layer_normal_on_boundary(const DensitySamples& q);

/// Single layer at the nodes themselves. The log singularity is integrated
/// exactly for trigonometric densities by splitting off ln(4 sin²(δ/2)).
std::vector<double> single_layer_on_boundary(const DensitySamples& q);

enum class LayerKind { single, double_ };
enum class JumpQuantity { value, normal_derivative };

/// One-sided evaluations at (ξ ± τν)/√(1+τ²) and their differences, exterior minus interior.
struct JumpReport {
    std::vector<double> taus;
    std::vector<double> interior;
    std::vector<double> exterior;
    std::vector<double> jumps;
    double interior_limit = 0.0;
    double exterior_limit = 0.0;
    double jump_limit = 0.0;
    double observed_order = 0.0;  ///< empirical rate of the jump sequence in τ
    std::size_t upsampled_m = 0;
};

/// Probes the limit relations at boundary node `node`. The density is upsampled by
/// trigonometric interpolation until the smallest τ is at least ten node spacings;
/// limits come from quadratic extrapolation through the last three τ.
JumpReport jump_probe(LayerKind layer, JumpQuantity quantity, const DensitySamples& q, std::size_t node,
                      const std::vector<double>& taus);

enum class NystromPath { closed_form, dense };

/// Density of the interior Dirichlet problem and its double-layer extension.
struct IdpSolution {
    DensitySamples density;
    double residual = 0.0;  ///< ∞-norm of F − (Q/2 + U₂[Q]) on the nodes
    double operator()(const Vec3& xi) const;
};

/// Solves F = U₂[Q] + Q/2 on a cap boundary.
IdpSolution solve_idp(const QuadratureGrid& boundary_grid, const ScalarSamples& F,
                      NystromPath path = NystromPath::closed_form);

struct InpSolution {
    DensitySamples density;
    double residual = 0.0;  ///< ∞-norm of F − (∂νU₁[Q̃] − Q̃/2) on the nodes
    double operator()(const Vec3& xi) const;
};

/// Solves F = ∂νU₁[Q̃] − Q̃/2 for mean-free F (|Σ wF| ≤ 1e-8) by diagonalizing the
/// circulant Nyström matrix; the zero mode is pinned so that Q̃ is mean-free.
InpSolution solve_inp(const QuadratureGrid& boundary_grid, const ScalarSamples& F);

}  // namespace sphaerica
