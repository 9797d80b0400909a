#pragma once

#include <optional>

#include "sphaerica/geometry.hpp"

namespace sphaerica {

/// Below this value of 1 − ξ·η the unregularized kernels refuse to evaluate.
inline constexpr double kSingularityGuard = 1e-14;

enum class KernelKind { fundamental, dirichlet_cap, neumann_cap, neumann_cap_regularized };

/// Which η-derivative of a kernel to take.
enum class Deriv { grad, curl };

struct KernelSpec {
    KernelKind kind = KernelKind::fundamental;
    std::optional<SphericalCap> cap;
    int J = 0;

    static KernelSpec fundamental() { return {}; }
    static KernelSpec dirichlet(const SphericalCap& c) { return {KernelKind::dirichlet_cap, c, 0}; }
    static KernelSpec neumann(const SphericalCap& c) { return {KernelKind::neumann_cap, c, 0}; }
    static KernelSpec neumann_regularized(const SphericalCap& c, int J) {
        return {KernelKind::neumann_cap_regularized, c, J};
    }

    /// Throws ValidationError for a cap kind without a cap or a negative J.
    void validate() const;
};

/// G(Δ*; t) = (1/4π) ln(1 − t) + (1/4π)(1 − ln 2).
double fundamental(double t);

/// G with the log replaced by its tangent line (2^J)(1 − t) − J ln 2 − 1 once 1 − t < 2^−J.
/// Continuous with a continuous first derivative; finite at t = 1.
double fundamental_regularized(double t, int J);

/// ∇*_η G(ξ·η) or L*_η G(ξ·η).
Vec3 fundamental_deriv(const Vec3& xi, const Vec3& eta, Deriv mode);

/// Regularized counterpart of fundamental_deriv; vanishes at η = ξ.
Vec3 fundamental_regularized_deriv(const Vec3& xi, const Vec3& eta, int J, Deriv mode);

/// ∂G/∂ν(η) at a boundary point η with outward normal ν.
double fundamental_normal(const Vec3& xi, const BoundaryPoint& eta);

/// Dirichlet Green function of the cap: vanishes for η on ∂Γ.
double dirichlet_green(const SphericalCap& cap, const Vec3& xi, const Vec3& eta);
Vec3 dirichlet_green_deriv(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, Deriv mode);
double dirichlet_green_normal(const SphericalCap& cap, const Vec3& xi, const BoundaryPoint& eta);
/// G_D with the regularized logarithm in place of ln(1 − ξ·η) near the source.
Vec3 dirichlet_green_regularized_deriv(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, int J, Deriv mode);

/// Neumann Green function of the cap: ν(η)·∇*_η G_N = 0 on ∂Γ.
double neumann_green(const SphericalCap& cap, const Vec3& xi, const Vec3& eta);
Vec3 neumann_green_deriv(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, Deriv mode);

/// G_N with its ln(1 − ξ·η) term regularized at scale J.
double neumann_green_regularized(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, int J);
Vec3 neumann_green_regularized_deriv(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, int J, Deriv mode);

/// Dispatch on a KernelSpec. Regularized-fundamental is not a kind; use the free functions.
double kernel_value(const KernelSpec& spec, const Vec3& xi, const Vec3& eta);
Vec3 kernel_deriv(const KernelSpec& spec, const Vec3& xi, const Vec3& eta, Deriv mode);

}  // namespace sphaerica
