#include "sphaerica/kernels.hpp"

#include <cmath>

#include "sphaerica/errors.hpp"

namespace sphaerica {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);
const double kLn2 = std::log(2.0);

double checked_gap(const Vec3& xi, const Vec3& eta) {
    const double gap = 1.0 - dot(xi, eta);
    if (gap < kSingularityGuard) throw SingularityError("kernel evaluated at its singularity (1 - xi.eta < 1e-14)");
    return gap;
}

// ∇*_η ln(1 − a·η) = −(a − (a·η)η)/(1 − a·η)
Vec3 grad_log_gap(const Vec3& a, const Vec3& eta, double gap) { return -project_tangent(a, eta) / gap; }

Vec3 apply_mode(const Vec3& eta, const Vec3& grad, Deriv mode) {
    return mode == Deriv::grad ? grad : cross(eta, grad);
}

void require_interior(const SphericalCap& cap, const Vec3& xi) {
    if (!cap.contains(xi)) throw ValidationError("cap Green function: source point lies outside the cap");
}

double regularized_log(double gap, int J) {
    const double eps = std::ldexp(1.0, -J);
    if (gap >= eps) return std::log(gap);
    return std::ldexp(gap, J) - J * kLn2 - 1.0;
}

// Reflected log term (1/4π) ln(ř(1 − ξ̌·η)) and its gradient.
double reflected_value(const SphericalCap& cap, const Vec3& xi, const Vec3& eta) {
    const Reflection r = reflect(cap, xi);
    return kInv4Pi * std::log(r.scale * (1.0 - dot(r.point.vec(), eta)));
}

Vec3 reflected_grad(const SphericalCap& cap, const Vec3& xi, const Vec3& eta) {
    const Reflection r = reflect(cap, xi);
    return kInv4Pi * grad_log_gap(r.point, eta, 1.0 - dot(r.point.vec(), eta));
}

double antipode_gap(const SphericalCap& cap, const Vec3& eta) {
    const double g = 1.0 + dot(cap.center().vec(), eta);
    if (g < kSingularityGuard) throw SingularityError("Neumann Green function evaluated at the antipode of the cap center");
    return g;
}

double neumann_tail_value(const SphericalCap& cap, const Vec3& xi, const Vec3& eta) {
    const double rho = cap.radius();
    const double g = antipode_gap(cap, eta);
    return reflected_value(cap, xi, eta) + (1.0 - rho) / (2.0 * kPi * rho) * std::log(g);
}

Vec3 neumann_tail_grad(const SphericalCap& cap, const Vec3& xi, const Vec3& eta) {
    const double rho = cap.radius();
    const double g = antipode_gap(cap, eta);
    const Vec3 zeta_part = project_tangent(cap.center().vec(), eta) / g;
    return reflected_grad(cap, xi, eta) + (1.0 - rho) / (2.0 * kPi * rho) * zeta_part;
}

}  // namespace

void KernelSpec::validate() const {
    if (kind != KernelKind::fundamental && !cap) throw ValidationError("KernelSpec: cap kernels need a cap");
    if (J < 0) throw ValidationError("KernelSpec: J must be non-negative");
}

double fundamental(double t) {
    if (1.0 - t < kSingularityGuard) throw SingularityError("fundamental: t too close to 1");
    return kInv4Pi * std::log(1.0 - t) + kInv4Pi * (1.0 - kLn2);
}

double fundamental_regularized(double t, int J) {
    if (J < 0) throw ValidationError("fundamental_regularized: J must be non-negative");
    return kInv4Pi * regularized_log(1.0 - t, J) + kInv4Pi * (1.0 - kLn2);
}

Vec3 fundamental_deriv(const Vec3& xi, const Vec3& eta, Deriv mode) {
    const double gap = checked_gap(xi, eta);
    return apply_mode(eta, kInv4Pi * grad_log_gap(xi, eta, gap), mode);
}

Vec3 fundamental_regularized_deriv(const Vec3& xi, const Vec3& eta, int J, Deriv mode) {
    const double gap = 1.0 - dot(xi, eta);
    const double eps = std::ldexp(1.0, -J);
    const Vec3 g = gap >= eps ? kInv4Pi * grad_log_gap(xi, eta, gap) : -std::ldexp(kInv4Pi, J) * project_tangent(xi, eta);
    return apply_mode(eta, g, mode);
}

double fundamental_normal(const Vec3& xi, const BoundaryPoint& eta) {
    const double gap = checked_gap(xi, eta.position);
    return -kInv4Pi * dot(eta.normal, xi) / gap;
}

double dirichlet_green(const SphericalCap& cap, const Vec3& xi, const Vec3& eta) {
    require_interior(cap, xi);
    const double gap = checked_gap(xi, eta);
    return kInv4Pi * std::log(gap) - reflected_value(cap, xi, eta);
}

Vec3 dirichlet_green_deriv(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, Deriv mode) {
    require_interior(cap, xi);
    const double gap = checked_gap(xi, eta);
    return apply_mode(eta, kInv4Pi * grad_log_gap(xi, eta, gap) - reflected_grad(cap, xi, eta), mode);
}

double dirichlet_green_normal(const SphericalCap& cap, const Vec3& xi, const BoundaryPoint& eta) {
    return dot(eta.normal, dirichlet_green_deriv(cap, xi, eta.position, Deriv::grad));
}

Vec3 dirichlet_green_regularized_deriv(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, int J, Deriv mode) {
    if (J < 0) throw ValidationError("dirichlet_green_regularized: J must be non-negative");
    require_interior(cap, xi);
    const Vec3 head = fundamental_regularized_deriv(xi, eta, J, Deriv::grad);
    return apply_mode(eta, head - reflected_grad(cap, xi, eta), mode);
}

double neumann_green(const SphericalCap& cap, const Vec3& xi, const Vec3& eta) {
    require_interior(cap, xi);
    const double gap = checked_gap(xi, eta);
    return kInv4Pi * std::log(gap) + neumann_tail_value(cap, xi, eta);
}

Vec3 neumann_green_deriv(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, Deriv mode) {
    require_interior(cap, xi);
    const double gap = checked_gap(xi, eta);
    return apply_mode(eta, kInv4Pi * grad_log_gap(xi, eta, gap) + neumann_tail_grad(cap, xi, eta), mode);
}

double neumann_green_regularized(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, int J) {
    if (J < 0) throw ValidationError("neumann_green_regularized: J must be non-negative");
    require_interior(cap, xi);
    return kInv4Pi * regularized_log(1.0 - dot(xi, eta), J) + neumann_tail_value(cap, xi, eta);
}

Vec3 neumann_green_regularized_deriv(const SphericalCap& cap, const Vec3& xi, const Vec3& eta, int J, Deriv mode) {
    if (J < 0) throw ValidationError("neumann_green_regularized: J must be non-negative");
    require_interior(cap, xi);
    const Vec3 head = fundamental_regularized_deriv(xi, eta, J, Deriv::grad);
    return apply_mode(eta, head + neumann_tail_grad(cap, xi, eta), mode);
}

double kernel_value(const KernelSpec& spec, const Vec3& xi, const Vec3& eta) {
    spec.validate();
    switch (spec.kind) {
        case KernelKind::fundamental: return fundamental(dot(xi, eta));
        case KernelKind::dirichlet_cap: return dirichlet_green(*spec.cap, xi, eta);
        case KernelKind::neumann_cap: return neumann_green(*spec.cap, xi, eta);
        case KernelKind::neumann_cap_regularized: return neumann_green_regularized(*spec.cap, xi, eta, spec.J);
    }
    throw ValidationError("kernel_value: unknown kernel kind");
}

Vec3 kernel_deriv(const KernelSpec& spec, const Vec3& xi, const Vec3& eta, Deriv mode) {
    spec.validate();
    switch (spec.kind) {
        case KernelKind::fundamental: return fundamental_deriv(xi, eta, mode);
        case KernelKind::dirichlet_cap: return dirichlet_green_deriv(*spec.cap, xi, eta, mode);
        case KernelKind::neumann_cap: return neumann_green_deriv(*spec.cap, xi, eta, mode);
        case KernelKind::neumann_cap_regularized:
            return neumann_green_regularized_deriv(*spec.cap, xi, eta, spec.J, mode);
    }
    throw ValidationError("kernel_deriv: unknown kernel kind");
}

}  // namespace sphaerica
