#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sphaerica/geometry.hpp"
#include "sphaerica/kernels.hpp"
#include "sphaerica/quadrature.hpp"

namespace sphaerica {

using ScalarField = std::function<double(const Vec3&)>;

/// Values of a solver at a set of probe points plus the diagnostics it was run with.
struct SolveReport {
    std::vector<UnitVector> probes;
    std::vector<double> values;
    double max_interior_residual = 0.0;
    double boundary_residual = 0.0;
    std::size_t n_t = 0;
    std::size_t n_phi = 0;
    std::size_t m = 0;
    int J = 0;
};

/// Evaluates f at every probe (in parallel); output order follows the probes.
std::vector<double> evaluate_points(const std::vector<UnitVector>& probes, const std::function<double(const UnitVector&)>& f);

/// ceil(log2(1/h)) + 2 with h the polar node spacing of an area grid.
int default_scale(const QuadratureGrid& grid);

/// ∫ G(ξ·η) H(η) dω(η); nodes within 1 − ξ·η < 2^−J use the regularized kernel.
double surface_potential(const QuadratureGrid& grid, const ScalarSamples& H, const Vec3& xi, int J);

/// Value and surface gradient of a density at the evaluation point.
struct LocalJet {
    double value = 0.0;
    Vec3 gradient{};
};

/// First-order model of a tangent field at ξ: f(η) ≈ value + (e1·η) d1 + (e2·η) d2.
struct TangentJet {
    Vec3 value{};
    Vec3 e1{}, e2{};
    Vec3 d1{}, d2{};
};

/// Local jets at node `node` of a product sphere grid, fitted by cubic least
/// squares to the samples on the surrounding 5×5 block of nodes.
LocalJet estimate_jet(const QuadratureGrid& sphere_grid, const ScalarSamples& H, std::size_t node);
TangentJet estimate_jet(const QuadratureGrid& sphere_grid, const VectorSamples& f, std::size_t node);

/// Sphere grids only: ∫ G^J(ξ·η)(H(η) − H(ξ) − ∇*H(ξ)·(η − (ξ·η)ξ)) dω(η). The subtracted
/// terms integrate to zero against G, so this is the same potential with a much
/// milder integrand at the singularity.
double surface_potential(const QuadratureGrid& grid, const ScalarSamples& H, const Vec3& xi, int J, const LocalJet& jet);

/// Δ*F(ξ) from a five-point stencil in geodesic normal coordinates. h ∈ [1e-4, 1e-2].
double beltrami_fd(const ScalarField& F, const Vec3& xi, double h = 1e-3);

/// Solution of Δ*U = H on the cap, using an auxiliary point ξ̄ outside its closure.
double poisson_solve_cap(const QuadratureGrid& cap_grid, const ScalarSamples& H, const Vec3& xi_bar, const Vec3& xi, int J);

/// Harmonic U on the cap with boundary values F; ξ must satisfy 1 − ξ·ζ < ρ − 1e-6.
double dirichlet_solve_cap(const QuadratureGrid& boundary_grid, const ScalarSamples& F, const Vec3& xi);

/// Harmonic U on the cap with ∂U/∂ν = F and the given mean over the cap.
/// Throws ValidationError unless |∫F dσ| ≤ 1e-8.
double neumann_solve_cap(const QuadratureGrid& boundary_grid, const ScalarSamples& F, double mean_value, const Vec3& xi);

inline constexpr double kNeumannCompatibilityTol = 1e-8;
inline constexpr double kDirichletMargin = 1e-6;

/// Recovers U (up to its mean, taken as 0) from f = ∇*U (mode grad) or f = L*U (mode curl).
/// Cap grids integrate against the regularized Neumann Green function, sphere grids against G^J.
double invert_gradient(const QuadratureGrid& grid, const VectorSamples& f, Deriv mode, int J, const Vec3& xi);

/// Sphere grids only: integrates f minus its linear model at ξ and adds the model's
/// exact contribution, (tr/6) for grad and −(e1·d2 − e2·d1)/2 for curl.
double invert_gradient(const QuadratureGrid& grid, const VectorSamples& f, Deriv mode, int J, const Vec3& xi,
                       const TangentJet& jet);

enum class MeanValueKind { area_and_boundary, boundary };

/// |F(ξ) − mean-value formula over Γ_ρ(ξ)| evaluated with product quadrature.
double mvp_residual(const ScalarField& F, const SphericalCap& probe_cap, MeanValueKind which, std::size_t n_t = 32,
                    std::size_t n_phi = 64, std::size_t m = 256);

/// True when the interior grid maximum does not exceed the boundary maximum by more than 1e-12.
bool max_principle_check(const ScalarField& F, const SphericalCap& cap, std::size_t n_t, std::size_t n_phi, std::size_t m);

}  // namespace sphaerica
