#include "sphaerica/geometry.hpp"

#include <cmath>
#include <string>

#include "sphaerica/errors.hpp"

namespace sphaerica {

UnitVector::UnitVector(const Vec3& v) {
    const double len = norm(v);
    if (!std::isfinite(len) || len == 0.0) {
        throw ValidationError("UnitVector: cannot normalize a zero or non-finite vector");
    }
    v_ = v / len;
}

UnitVector UnitVector::from_lonlat_deg(double lon_deg, double lat_deg) {
    if (!std::isfinite(lon_deg) || !std::isfinite(lat_deg) || std::abs(lat_deg) > 90.0) {
        throw ValidationError("UnitVector: invalid longitude/latitude");
    }
    // cos(90°) is not exactly zero in floating point; keep the poles exact.
    if (std::abs(lat_deg) == 90.0) return UnitVector(Vec3{0.0, 0.0, lat_deg > 0 ? 1.0 : -1.0});
    const double lon = lon_deg * kPi / 180.0;
    const double lat = lat_deg * kPi / 180.0;
    return UnitVector(Vec3{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)});
}

double UnitVector::lon_deg() const { return std::atan2(v_.y, v_.x) * 180.0 / kPi; }

double UnitVector::lat_deg() const {
    return std::atan2(v_.z, std::hypot(v_.x, v_.y)) * 180.0 / kPi;
}

SphericalCap::SphericalCap(const UnitVector& center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0 && radius < 2.0)) {
        throw ValidationError("SphericalCap: radius must lie in (0, 2), got " + std::to_string(radius));
    }
}

double SphericalCap::boundary_radius() const { return std::sqrt(radius_ * (2.0 - radius_)); }

SphericalCap SphericalCap::complement() const { return {-center_, 2.0 - radius_}; }

RotationFrame rotation_to_pole(const UnitVector& zeta) {
    const Vec3& z = zeta.vec();
    const Vec3 e1{1.0, 0.0, 0.0};
    const Vec3 e3{0.0, 0.0, 1.0};
    RotationFrame t;
    if (std::abs(z.z) < 1.0 - 1e-9) {
        // c2 is the horizontal direction ε³ × ζ, c1 = c2 × ζ so that c1 × c2 = ζ.
        const Vec3 c2 = cross(e3, z) / norm(cross(e3, z));
        t.columns = {cross(c2, z), c2, z};
    } else {
        // Near the poles: Gram-Schmidt from ε¹. Reduces to the identity at ε³
        // and to the rotation by π about ε¹ at −ε³.
        const Vec3 c1 = project_tangent(e1, z);
        const Vec3 c1n = c1 / norm(c1);
        t.columns = {c1n, cross(z, c1n), z};
    }
    return t;
}

PlanarPoint stereographic_project(const RotationFrame& frame, const Vec3& xi) {
    const double denom = 1.0 + dot(xi, frame.e3());
    if (denom < 1e-14) {
        throw ValidationError("stereographic_project: point is the antipode of the projection center");
    }
    return {2.0 * dot(xi, frame.e1()) / denom, 2.0 * dot(xi, frame.e2()) / denom};
}

PlanarPoint stereographic_project(const UnitVector& zeta, const UnitVector& xi) {
    return stereographic_project(rotation_to_pole(zeta), xi.vec());
}

UnitVector stereographic_unproject(const UnitVector& zeta, const PlanarPoint& p) {
    const RotationFrame t = rotation_to_pole(zeta);
    const double s = p.x * p.x + p.y * p.y;
    const double scale = 4.0 / (4.0 + s);
    return UnitVector(t.apply({p.x * scale, p.y * scale, (4.0 - s) / (4.0 + s)}));
}

BoundaryPoint boundary_frame(const SphericalCap& cap, const RotationFrame& frame, double phi) {
    const double rho = cap.radius();
    const double s = cap.boundary_radius();
    const Vec3& zeta = cap.center().vec();
    const Vec3 dir = std::cos(phi) * frame.e1() + std::sin(phi) * frame.e2();
    BoundaryPoint bp;
    bp.position = UnitVector((1.0 - rho) * zeta + s * dir);
    bp.normal = ((1.0 - rho) * bp.position.vec() - zeta) / s;
    bp.tangent = cross(bp.position.vec(), bp.normal);
    bp.phi = phi;
    return bp;
}

BoundaryPoint boundary_frame(const SphericalCap& cap, double phi) {
    return boundary_frame(cap, rotation_to_pole(cap.center()), phi);
}

Reflection reflect(const SphericalCap& cap, const Vec3& xi) {
    if (!cap.contains(xi)) {
        throw ValidationError("reflect: point lies outside the cap");
    }
    const double rho = cap.radius();
    const double t = dot(xi, cap.center().vec());
    const double denom = rho * (2.0 - rho);
    const double scale = (1.0 + 2.0 * t * (rho - 1.0) + (rho - 1.0) * (rho - 1.0)) / denom;
    // (ř − 1)/(ř(ρ − 1)) written without the 0/0 at ρ = 1.
    const double c2 = 2.0 * (rho - 1.0 + t) / (scale * denom);
    return {UnitVector(xi / scale - c2 * cap.center().vec()), scale};
}

CapMetrics cap_metrics(const SphericalCap& cap) {
    return {2.0 * kPi * cap.radius(), 2.0 * kPi * cap.boundary_radius()};
}

}  // namespace sphaerica
