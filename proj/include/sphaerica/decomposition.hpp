#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sphaerica/geometry.hpp"
#include "sphaerica/harmonics.hpp"
#include "sphaerica/quadrature.hpp"
#include "sphaerica/solvers.hpp"

namespace sphaerica {

/// Helmholtz scalars sampled at a list of points.
struct HelmholtzScalars {
    std::vector<UnitVector> points;
    std::vector<double> F1, F2, F3;
    std::string normalization;
};

/// Spectral carrier of the same scalars.
struct HelmholtzCoefficients {
    ShCoefficients F1, F2, F3;
};

struct HardyHodgeScalars {
    std::vector<UnitVector> points;
    std::vector<double> F1, F2, F3;
};

struct HardyHodgeCoefficients {
    ShCoefficients F1, F2, F3;
};

/// ξF₁ + ∇*F₂ + L*F₃ from values and surface gradients at ξ.
Vec3 helmholtz_compose(const Vec3& xi, double F1, const Vec3& grad_F2, const Vec3& grad_F3);
Vec3 helmholtz_compose(const HelmholtzCoefficients& c, const Vec3& xi);

/// Full-sphere decomposition at the grid nodes. Tangential parts are inverted
/// against G^J with a local linear model subtracted; F₂ and F₃ are mean-free.
HelmholtzScalars helmholtz_decompose_sphere(const QuadratureGrid& sphere_grid, const VectorSamples& f, int J);

/// Projects sampled scalars from a sphere grid onto degrees ≤ max_degree.
HelmholtzCoefficients helmholtz_coefficients(const QuadratureGrid& sphere_grid, const HelmholtzScalars& s,
                                             int max_degree);

/// Cap decomposition at `points` (inside the cap). F₂ uses the regularized Neumann
/// Green function, F₃ the regularized Dirichlet one with boundary values `F3_boundary`
/// (zero when absent). F₁ = ξ·f is only defined at the cap nodes and is NaN elsewhere.
HelmholtzScalars helmholtz_decompose_cap(const QuadratureGrid& cap_grid, const VectorSamples& f,
                                         const QuadratureGrid& boundary_grid,
                                         const std::optional<ScalarSamples>& F3_boundary, int J,
                                         const std::vector<UnitVector>& points);

/// Multiplies degree n by (n + 1/2)^power, power ∈ {+1, −1}.
ShCoefficients d_apply(const ShCoefficients& c, int power);

/// D⁻¹F(ξ) as the convolution with 1/(2π√(2(1 − ξ·η))). The value F(ξ) is subtracted
/// and added back through the exact kernel mass 2.
double d_inv_convolve(const QuadratureGrid& sphere_grid, const ScalarSamples& F, const Vec3& xi, double F_at_xi);

/// Same, additionally subtracting the gradient term, which the kernel annihilates by symmetry.
double d_inv_convolve(const QuadratureGrid& sphere_grid, const ScalarSamples& F, const Vec3& xi, const LocalJet& jet);

enum class DInversePath { spectral, convolution };

/// Hardy-Hodge scalars at the grid nodes, built from the Helmholtz scalars. The spectral
/// path projects F₁, F₂ onto degrees ≤ max_degree first.
HardyHodgeScalars hardy_hodge_decompose_sphere(const QuadratureGrid& sphere_grid, const VectorSamples& f, int J,
                                               DInversePath path, int max_degree = 16);

/// õ⁽¹⁾F̃₁ + õ⁽²⁾F̃₂ + õ⁽³⁾F̃₃, with D applied spectrally.
Vec3 hardy_hodge_compose(const HardyHodgeCoefficients& c, const Vec3& xi);

/// Helmholtz coefficients of the same field: F₁ = (D+½)F̃₁ + (D−½)F̃₂, F₂ = F̃₂ − F̃₁, F₃ = F̃₃.
HelmholtzCoefficients hardy_hodge_to_helmholtz(const HardyHodgeCoefficients& c);

}  // namespace sphaerica
