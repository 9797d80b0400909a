#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sphaerica/geometry.hpp"
#include "sphaerica/harmonics.hpp"
#include "sphaerica/quadrature.hpp"
#include "sphaerica/solvers.hpp"

namespace sphaerica {

/// Scaling constants. The dimensionless default makes every output convention-free.
struct PhysicalConstants {
    double R = 1.0;
    double GM = 1.0;
    double omega = 1.0;  ///< |w|, Earth rotation rate
    double G = 1.0;      ///< gravity for the topography scaling

    void validate() const;
};

/// A solver report together with its comparison against a known answer.
struct AppReport : SolveReport {
    std::vector<double> oracle;  ///< empty when no oracle was given
    double sup_error = 0.0;
    double rel_l2_error = 0.0;   ///< ‖error‖₂ / ‖oracle‖₂ over the probes
    double rel_max_error = 0.0;  ///< sup error / sup |oracle|
    std::size_t M = 0;
    double rho_bar = 0.0;
    double lambda = 0.0;
    double condition = 0.0;
};

/// Potential and the tangent field derived from it, both sampled on a cap grid.
struct ForwardSamples {
    ScalarSamples potential;
    VectorSamples field;
};

/// Area mean of cap-grid samples.
double cap_mean(const QuadratureGrid& cap_grid, const ScalarSamples& s);

/// Fills sup/ℓ² errors of `report.values` against `oracle` evaluated at the probes.
void attach_errors(AppReport& report, const ScalarField& oracle);

/// Θ = −(R/GM) ∇*T on the grid nodes.
ForwardSamples vd_forward(const ShCoefficients& T, const QuadratureGrid& cap_grid, const PhysicalConstants& k = {});

/// T_J = T_mean + (GM/R) ∫ ∇*_η G_N^J · Θ dω at the probes.
AppReport vd_reconstruct(const QuadratureGrid& cap_grid, const VectorSamples& theta, int J, double T_mean,
                         const std::vector<UnitVector>& probes, const PhysicalConstants& k = {},
                         const std::optional<ScalarField>& oracle = std::nullopt);

/// Smallest |ξ·ε³| over the closed cap.
double equator_clearance(const SphericalCap& cap);
inline constexpr double kEquatorGuard = 0.15;

/// Geostrophic velocity v = G L*H / (2R|w|(ξ·ε³)). Throws ValidationError when the
/// cap comes closer to the equator than kEquatorGuard.
ForwardSamples geo_forward(const ShCoefficients& H, const QuadratureGrid& cap_grid, const PhysicalConstants& k = {});

/// H_J = H_mean − (2R|w|/G) ∫ (η·ε³) L*_η G_N^J · v dω at the probes.
AppReport geo_reconstruct(const QuadratureGrid& cap_grid, const VectorSamples& v, int J, double H_mean,
                          const std::vector<UnitVector>& probes, const PhysicalConstants& k = {},
                          const std::optional<ScalarField>& oracle = std::nullopt);

struct VortexSet {
    std::vector<UnitVector> centers;
    std::vector<double> strengths;
    UnitVector xi_bar;  ///< regularization point outside the cap

    std::size_t size() const { return centers.size(); }
};

/// Checks centres are interior and pairwise distinct and ξ̄ lies outside the closed cap.
void validate_vortices(const SphericalCap& cap, const VortexSet& v);

/// N vortices, area-uniform in the concentric cap of radius spread·ρ, strengths uniform in [−1, 1].
/// ξ̄ defaults to −ζ.
VortexSet random_vortices(const SphericalCap& cap, std::size_t N, std::uint64_t seed, double spread = 0.8);

/// Ψ = Σ (ω_i/R) G_D(η_i, ξ).
double vortex_exact(const SphericalCap& cap, const VortexSet& v, const Vec3& xi, double R = 1.0);

/// Σ (ω_i/R) [G(ξ·η_i) − (1/4π) ln(1 − ξ·ξ̄)], the free-space part of Ψ.
double vortex_free_part(const VortexSet& v, const Vec3& xi, double R = 1.0);

/// Ψ = free part − Ψ̃, with Ψ̃ built from M modified logarithmic basis functions (M − 1 sources
/// on 1 − ξ·ζ = ρ̄) fitted at `collocation` equidistant boundary nodes (0 means M).
/// Errors are taken against vortex_exact.
///
/// With sources close to the boundary the square system aliases the top source modes onto low
/// ones; oversampling the collocation by 2 to 4 removes most of that error.
AppReport vortex_mfs(const SphericalCap& cap, const VortexSet& v, std::size_t M, double rho_bar, double lambda,
                     const std::vector<UnitVector>& probes, double R = 1.0, std::size_t collocation = 0);

}  // namespace sphaerica
