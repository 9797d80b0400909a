#pragma once

#include <cstddef>
#include <vector>

#include "sphaerica/geometry.hpp"
#include "sphaerica/quadrature.hpp"

namespace sphaerica {

enum class BasisVariant { gk, gk_normal, gk_mod, inner_harmonic };

/// Basis functions Φ_0, …, Φ_{size−1} for fitting boundary data on a cap.
///
/// gk:             Φ_0 = 1/4π, Φ_k = (1/4π) ln(1 − ξ·ξ̄_k)
/// gk_normal:      Φ_0 = 1/4π, Φ_k = (1/4π) ∂/∂ν ln(1 − ξ·ξ̄_k)
/// gk_mod:         Φ_0 = 1/4π, Φ_k = (1/4π) [ln(1 − ξ·ξ̄_k) − ln(1 − ξ·ξ̄)]
/// inner_harmonic: Φ_0 = H_{0,1}, Φ_{2n−1} = H_{n,1}, Φ_{2n} = H_{n,2}
///
/// For gk_normal, ν at interior points is the unit tangent pointing away from
/// the cap centre, which is the outward normal on the boundary.
struct FundamentalSystem {
    BasisVariant variant = BasisVariant::gk_mod;
    SphericalCap cap{UnitVector(), 1.0};
    std::vector<UnitVector> sources;
    UnitVector xi_bar;
    double rho_bar = 0.0;  ///< radius of the source circle, or of the outer cap for inner harmonics
    int max_degree = 0;  ///< inner_harmonic only

    std::size_t size() const;
};

/// Places size − 1 sources equidistantly on the circle 1 − ξ·ζ = ρ̄ (gk variants) or
/// uses inner harmonics up to degree (size − 1)/2. Validates ρ̄ ≠ ρ and ξ̄ outside the cap.
FundamentalSystem make_fundamental_system(BasisVariant variant, const SphericalCap& cap, std::size_t size,
                                          double rho_bar, const UnitVector& xi_bar);

/// Outward-pointing unit tangent at ξ (away from the cap centre).
Vec3 cap_normal_field(const SphericalCap& cap, const Vec3& xi);

enum class BasisMode { value, normal_derivative };

/// Φ_k(ξ) or ∂Φ_k/∂ν(ξ); throws SingularityError at a source point or at ξ̄.
double basis_eval(const FundamentalSystem& system, std::size_t k, const Vec3& xi, BasisMode mode = BasisMode::value);

enum class FitKind { interpolation, least_squares, tikhonov };

struct FitMode {
    FitKind kind = FitKind::tikhonov;
    double lambda = 1e-12;
};

struct MfsSolution {
    FundamentalSystem system;
    std::vector<double> coefficients;
    FitMode mode;
    BasisMode data_mode = BasisMode::value;
    double boundary_residual = 0.0;  ///< ∞-norm at the collocation nodes
    double condition = 0.0;          ///< σ_max/σ_min of the collocation matrix
};

/// Fits boundary values (or normal derivatives) sampled on a cap boundary grid.
MfsSolution mfs_fit(const FundamentalSystem& system, const QuadratureGrid& collocation, const ScalarSamples& F,
                    FitMode mode = {}, BasisMode data_mode = BasisMode::value);

/// Σ a_k Φ_k(ξ).
double mfs_eval(const MfsSolution& solution, const Vec3& xi);

}  // namespace sphaerica
