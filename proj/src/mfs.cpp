#include "sphaerica/mfs.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "sphaerica/errors.hpp"
#include "sphaerica/harmonics.hpp"
#include "sphaerica/kernels.hpp"
#include "sphaerica/parallel.hpp"

namespace sphaerica {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

double checked_gap(const Vec3& a, const Vec3& b) {
    const double gap = 1.0 - dot(a, b);
    if (gap < kSingularityGuard) throw SingularityError("basis function evaluated at its source point");
    return gap;
}

// (1/4π) ln(1 − ξ·a) and its derivative along the unit tangent n.
double log_value(const Vec3& xi, const Vec3& a) { return kInv4Pi * std::log(checked_gap(xi, a)); }
double log_normal(const Vec3& xi, const Vec3& a, const Vec3& n) { return -kInv4Pi * dot(n, a) / checked_gap(xi, a); }

// Φ_0 = H_{0,1}, Φ_{2n−1} = H_{n,1}, Φ_{2n} = H_{n,2} on the outer cap.
InnerHarmonicIndex harmonic_index(const FundamentalSystem& s, std::size_t k) {
    const SphericalCap outer(s.cap.center(), s.rho_bar);
    if (k == 0) return {outer, 0, 1};
    return {outer, static_cast<int>((k + 1) / 2), k % 2 == 1 ? 1 : 2};
}

}  // namespace

std::size_t FundamentalSystem::size() const {
    if (variant == BasisVariant::inner_harmonic) return 2 * static_cast<std::size_t>(max_degree) + 1;
    return sources.size() + 1;
}

FundamentalSystem make_fundamental_system(BasisVariant variant, const SphericalCap& cap, std::size_t size,
                                          double rho_bar, const UnitVector& xi_bar) {
    if (size < 1) throw ValidationError("make_fundamental_system: need at least one basis function");
    if (!(rho_bar > 0.0 && rho_bar < 2.0)) throw ValidationError("make_fundamental_system: source radius must lie in (0, 2)");
    if (std::abs(rho_bar - cap.radius()) <= 1e-12) {
        throw ValidationError("make_fundamental_system: sources must lie off the boundary curve");
    }
    if (variant == BasisVariant::inner_harmonic && rho_bar <= cap.radius()) {
        throw ValidationError("make_fundamental_system: inner harmonics need a larger cap than the target");
    }
    if (variant == BasisVariant::gk_mod && cap.contains(xi_bar)) {
        throw ValidationError("make_fundamental_system: regularization point must lie outside the cap");
    }
    FundamentalSystem s;
    s.variant = variant;
    s.cap = cap;
    s.xi_bar = xi_bar;
    const SphericalCap source_cap(cap.center(), rho_bar);
    const RotationFrame frame = rotation_to_pole(cap.center());
    s.rho_bar = rho_bar;
    if (variant == BasisVariant::inner_harmonic) {
        s.max_degree = static_cast<int>((size - 1) / 2);
        if (s.max_degree > kMaxShDegree) throw ValidationError("make_fundamental_system: too many inner harmonics");
        return s;
    }
    const std::size_t n = size - 1;
    for (std::size_t k = 0; k < n; ++k) {
        const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        s.sources.push_back(boundary_frame(source_cap, frame, phi).position);
    }
    return s;
}

Vec3 cap_normal_field(const SphericalCap& cap, const Vec3& xi) {
    const Vec3 t = project_tangent(-cap.center().vec(), xi);
    const double len = norm(t);
    if (len < 1e-14) throw SingularityError("cap_normal_field: undefined at the cap centre and its antipode");
    return t / len;
}

double basis_eval(const FundamentalSystem& system, std::size_t k, const Vec3& xi, BasisMode mode) {
    if (k >= system.size()) throw ValidationError("basis_eval: index out of range");
    if (system.variant == BasisVariant::inner_harmonic) {
        const InnerHarmonicIndex idx = harmonic_index(system, k);
        if (mode == BasisMode::value) return inner_harmonic_eval(idx, xi);
        return dot(cap_normal_field(system.cap, xi), inner_harmonic_grad(idx, xi));
    }
    if (k == 0) return mode == BasisMode::value ? kInv4Pi : 0.0;
    const Vec3& src = system.sources[k - 1].vec();
    switch (system.variant) {
        case BasisVariant::gk:
            return mode == BasisMode::value ? log_value(xi, src) : log_normal(xi, src, cap_normal_field(system.cap, xi));
        case BasisVariant::gk_normal:
            if (mode != BasisMode::value) throw ValidationError("basis_eval: gk_normal functions are already normal derivatives");
            return log_normal(xi, src, cap_normal_field(system.cap, xi));
        case BasisVariant::gk_mod: {
            if (mode == BasisMode::value) return log_value(xi, src) - log_value(xi, system.xi_bar);
            const Vec3 n = cap_normal_field(system.cap, xi);
            return log_normal(xi, src, n) - log_normal(xi, system.xi_bar, n);
        }
        case BasisVariant::inner_harmonic: break;
    }
    throw ValidationError("basis_eval: unknown variant");
}

MfsSolution mfs_fit(const FundamentalSystem& system, const QuadratureGrid& collocation, const ScalarSamples& F,
                    FitMode mode, BasisMode data_mode) {
    if (collocation.kind != GridKind::boundary_line) throw ValidationError("mfs_fit: collocation must be a boundary grid");
    if (F.size() != collocation.size()) throw ValidationError("mfs_fit: data size does not match the collocation grid");
    const std::size_t rows = collocation.size(), cols = system.size();
    if (mode.kind == FitKind::interpolation && rows != cols) {
        throw ValidationError("mfs_fit: interpolation needs as many collocation points as basis functions");
    }
    if (mode.kind == FitKind::least_squares && rows < cols) {
        throw ValidationError("mfs_fit: least squares needs at least as many collocation points as basis functions");
    }
    if (mode.kind == FitKind::tikhonov && !(mode.lambda >= 0.0)) throw ValidationError("mfs_fit: lambda must be non-negative");

    const auto R = static_cast<Eigen::Index>(rows), C = static_cast<Eigen::Index>(cols);
    Eigen::MatrixXd A(R, C);
    parallel_for(rows, [&](std::size_t i) {
        for (std::size_t k = 0; k < cols; ++k) {
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = basis_eval(system, k, collocation.nodes[i], data_mode);
        }
    });
    const Eigen::Map<const Eigen::VectorXd> b(F.values.data(), R);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sigma = svd.singularValues();
    Eigen::VectorXd a;
    if (mode.kind == FitKind::tikhonov) {
        const Eigen::VectorXd ub = svd.matrixU().transpose() * b;
        Eigen::VectorXd filtered(sigma.size());
        for (Eigen::Index i = 0; i < sigma.size(); ++i) {
            const double s = sigma(i);
            filtered(i) = s > 0.0 ? s / (s * s + mode.lambda) * ub(i) : 0.0;
        }
        a = svd.matrixV() * filtered;
    } else {
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        if (qr.rank() < C) {
            throw NumericalError("mfs_fit: collocation matrix is numerically singular (rank " + std::to_string(qr.rank()) +
                                 " of " + std::to_string(cols) + "); use the Tikhonov mode");
        }
        a = qr.solve(b);
    }
    MfsSolution sol;
    sol.system = system;
    sol.mode = mode;
    sol.data_mode = data_mode;
    sol.coefficients.assign(a.data(), a.data() + a.size());
    for (double v : sol.coefficients) {
        if (!std::isfinite(v)) throw NumericalError("mfs_fit: non-finite coefficients");
    }
    sol.boundary_residual = (A * a - b).cwiseAbs().maxCoeff();
    const double smin = sigma.size() > 0 ? sigma(sigma.size() - 1) : 0.0;
    sol.condition = smin > 0.0 ? sigma(0) / smin : INFINITY;
    return sol;
}

double mfs_eval(const MfsSolution& solution, const Vec3& xi) {
    double sum = 0.0;
    for (std::size_t k = 0; k < solution.coefficients.size(); ++k) {
        if (solution.coefficients[k] != 0.0) sum += solution.coefficients[k] * basis_eval(solution.system, k, xi);
    }
    return sum;
}

}  // namespace sphaerica
