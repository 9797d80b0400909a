#pragma once

#include <array>

#include "sphaerica/vec3.hpp"

namespace sphaerica {

inline constexpr double kPi = 3.14159265358979323846;

/// A point of the unit sphere. The constructor normalizes its argument.
class UnitVector {
public:
    constexpr UnitVector() : v_{0.0, 0.0, 1.0} {}
    explicit UnitVector(const Vec3& v);
    UnitVector(double x, double y, double z) : UnitVector(Vec3{x, y, z}) {}

    static UnitVector from_lonlat_deg(double lon_deg, double lat_deg);

    const Vec3& vec() const { return v_; }
    operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)

    double x() const { return v_.x; }
    double y() const { return v_.y; }
    double z() const { return v_.z; }

    double lon_deg() const;
    double lat_deg() const;

    UnitVector operator-() const { return UnitVector(-v_, Raw{}); }

private:
    struct Raw {};
    UnitVector(const Vec3& v, Raw) : v_(v) {}

    Vec3 v_;
};

/// Spherical cap {ξ : 1 − ξ·ζ < ρ} with center ζ and radius ρ ∈ (0, 2).
class SphericalCap {
public:
    SphericalCap(const UnitVector& center, double radius);

    const UnitVector& center() const { return center_; }
    double radius() const { return radius_; }

    /// 1 − ξ·ζ, the "polar distance" used for all membership tests.
    double gap(const Vec3& xi) const { return 1.0 - dot(xi, center_.vec()); }

    bool contains(const Vec3& xi) const { return gap(xi) < radius_; }

    /// Interior test with a safety margin; solvers use this to stay clear of ∂Γ.
    bool contains_strictly(const Vec3& xi, double margin = 1e-14) const {
        return gap(xi) < radius_ - margin;
    }

    /// Radius of the boundary circle in the embedding space, √(ρ(2−ρ)).
    double boundary_radius() const;

    /// The complementary cap Γ_{2−ρ}(−ζ).
    SphericalCap complement() const;

    /// Concentric cap with radius scaled by `factor`.
    SphericalCap shrunk(double factor) const { return {center_, radius_ * factor}; }

private:
    UnitVector center_;
    double radius_;
};

/// Orthonormal frame with positive orientation; column 2 is the pole ζ.
struct RotationFrame {
    std::array<Vec3, 3> columns;

    const Vec3& e1() const { return columns[0]; }
    const Vec3& e2() const { return columns[1]; }
    const Vec3& e3() const { return columns[2]; }

    /// t·(a, b, c) = a·e1 + b·e2 + c·e3.
    Vec3 apply(const Vec3& local) const {
        return local.x * columns[0] + local.y * columns[1] + local.z * columns[2];
    }
    double determinant() const { return dot(columns[0], cross(columns[1], columns[2])); }
};

struct BoundaryPoint {
    UnitVector position;
    Vec3 tangent;  ///< τ = η × ν, positively oriented about the cap center
    Vec3 normal;   ///< ν, tangent to the sphere, pointing out of the cap
    double phi = 0.0;
};

/// Spherical Kelvin image of an interior point: 1 − ξ·η = scale·(1 − point·η) on ∂Γ.
struct Reflection {
    UnitVector point;
    double scale = 1.0;
};

struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;
};

struct CapMetrics {
    double area = 0.0;
    double circumference = 0.0;
};

RotationFrame rotation_to_pole(const UnitVector& zeta);

/// Stereographic projection from −ζ onto the tangent plane at ζ, in the
/// coordinates of rotation_to_pole(ζ). Throws ValidationError at the antipode.
PlanarPoint stereographic_project(const UnitVector& zeta, const UnitVector& xi);
PlanarPoint stereographic_project(const RotationFrame& frame, const Vec3& xi);

/// Inverse of stereographic_project.
UnitVector stereographic_unproject(const UnitVector& zeta, const PlanarPoint& p);

BoundaryPoint boundary_frame(const SphericalCap& cap, double phi);
BoundaryPoint boundary_frame(const SphericalCap& cap, const RotationFrame& frame, double phi);

/// Kelvin reflection of ξ ∈ Γ. Throws ValidationError when ξ is not in the cap.
Reflection reflect(const SphericalCap& cap, const Vec3& xi);

CapMetrics cap_metrics(const SphericalCap& cap);

}  // namespace sphaerica
