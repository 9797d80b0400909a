#include <doctest.h>

#include <cmath>

#include "sphaerica/errors.hpp"
#include "sphaerica/kernels.hpp"
#include "sphaerica/quadrature.hpp"
#include "sphaerica/solvers.hpp"
#include "test_util.hpp"

using namespace sphaerica;

namespace {

// Independent oracle: the unregularized log kernel written out directly.
double log_kernel(double t) { return (std::log(1.0 - t) + 1.0 - std::log(2.0)) / (4.0 * kPi); }

}  // namespace

TEST_CASE("fundamental solution values") {
    CHECK(std::abs(fundamental(-1.0) - 1.0 / (4.0 * kPi)) < 1e-15);
    CHECK(std::abs(fundamental(1.0 - 2.0 / std::exp(1.0))) < 1e-16);
    testutil::Rng rng(1);
    for (int i = 0; i < 20; ++i) {
        const double t = rng.uniform(-1.0, 0.999);
        CHECK(fundamental(t) == doctest::Approx(log_kernel(t)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(fundamental(1.0), SingularityError);
    CHECK_THROWS_AS(fundamental(1.0 - 1e-15), SingularityError);
    CHECK_NOTHROW(fundamental(1.0 - 1e-13));
}

TEST_CASE("fundamental solution has zero spherical mean") {
    testutil::Rng rng(2);
    for (int i = 0; i < 5; ++i) {
        const UnitVector xi = rng.point();
        const QuadratureGrid g = build_sphere_grid(64, 128, xi, 3);
        CHECK(std::abs(g.total_weight() - 4 * kPi) < 1e-12);
        const double mean = integrate(g, sample(g, [&](const UnitVector& e) { return fundamental(dot(xi.vec(), e.vec())); }));
        CHECK(std::abs(mean) < 1e-10);
    }
}

TEST_CASE("fundamental solution derivatives") {
    testutil::Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const UnitVector xi = rng.point();
        const UnitVector eta = rng.point();
        if (1.0 - dot(xi.vec(), eta.vec()) < 1e-2) continue;
        const Vec3 g = fundamental_deriv(xi, eta, Deriv::grad);
        const Vec3 c = fundamental_deriv(xi, eta, Deriv::curl);
        CHECK(std::abs(dot(g, eta.vec())) < 1e-12);
        CHECK(std::abs(dot(c, eta.vec())) < 1e-12);
        CHECK(testutil::max_abs_diff(c, cross(eta.vec(), g)) < 1e-15);
        auto f = [&](const Vec3& x) { return log_kernel(dot(xi.vec(), x)); };
        CHECK(testutil::max_abs_diff(g, testutil::fd_gradient(f, eta)) < 1e-6);
    }
    CHECK_THROWS_AS(fundamental_deriv(UnitVector(0, 0, 1), UnitVector(0, 0, 1), Deriv::grad), SingularityError);
}

TEST_CASE("normal derivative on a cap boundary") {
    const double rho = 0.5;
    const SphericalCap cap(UnitVector(0.4, -0.1, 0.6), rho);
    const double kappa = (1.0 - rho) / (4.0 * kPi * std::sqrt(rho * (2.0 - rho)));
    const QuadratureGrid b = build_boundary_grid(cap, 256);
    for (std::size_t i = 0; i < b.size(); i += 17) {
        for (std::size_t j = 0; j < b.size(); j += 13) {
            if (i == j) continue;
            CHECK(std::abs(fundamental_normal(b.nodes[i], b.frames[j]) - kappa) < 1e-12);
        }
    }
    auto flux = [&](const Vec3& xi, bool on_boundary_node) {
        return weighted_sum(b.weights, [&](std::size_t j) {
            if (on_boundary_node && 1.0 - dot(xi, b.nodes[j].vec()) < 1e-14) return kappa;
            return fundamental_normal(xi, b.frames[j]);
        });
    };
    CHECK(std::abs(flux(cap.center(), false) - 0.75) < 1e-10);
    CHECK(std::abs(flux(testutil::Rng(4).point_in(cap.center(), 0.4), false) - 0.75) < 1e-10);
    CHECK(std::abs(flux(-cap.center().vec(), false) + 0.25) < 1e-10);
    CHECK(std::abs(flux(b.nodes[10], true) - 0.25) < 1e-10);
}

TEST_CASE("Dirichlet Green function") {
    testutil::Rng rng(5);
    for (double rho : {0.3, 1.0, 1.6}) {
        const SphericalCap cap(rng.point(), rho);
        const QuadratureGrid b = build_boundary_grid(cap, 32);
        for (int trial = 0; trial < 5; ++trial) {
            const UnitVector xi = rng.point_in(cap.center(), 0.9 * rho);
            for (const auto& eta : b.nodes) CHECK(std::abs(dirichlet_green(cap, xi, eta)) < 1e-12);
            const UnitVector eta = rng.point_in(cap.center(), 0.9 * rho);
            if (1.0 - dot(xi.vec(), eta.vec()) < 1e-3) continue;
            CHECK(std::abs(dirichlet_green(cap, xi, eta) - dirichlet_green(cap, eta, xi)) < 1e-10);
            auto f = [&](const Vec3& x) { return dirichlet_green(cap, xi, x); };
            CHECK(std::abs(beltrami_fd(f, eta, 1e-3)) < 1e-3);
            const Vec3 g = dirichlet_green_deriv(cap, xi, eta, Deriv::grad);
            CHECK(std::abs(dot(g, eta.vec())) < 1e-12);
            CHECK(testutil::max_abs_diff(g, testutil::fd_gradient(f, eta)) < 1e-6);
            CHECK(testutil::max_abs_diff(dirichlet_green_deriv(cap, xi, eta, Deriv::curl), cross(eta.vec(), g)) < 1e-15);
        }
        const BoundaryPoint bp = b.frames[3];
        const UnitVector xi = rng.point_in(cap.center(), 0.5 * rho);
        CHECK(dirichlet_green_normal(cap, xi, bp) == doctest::Approx(dot(bp.normal, dirichlet_green_deriv(cap, xi, bp.position, Deriv::grad))));
    }
    const SphericalCap cap(UnitVector(0, 0, 1), 0.5);
    CHECK_THROWS_AS(dirichlet_green(cap, UnitVector(1, 0, 0), UnitVector(0, 0, 1)), ValidationError);
    CHECK_THROWS_AS(dirichlet_green(cap, UnitVector(0, 0, 1), UnitVector(0, 0, 1)), SingularityError);
}

TEST_CASE("Neumann Green function") {
    testutil::Rng rng(6);
    for (double rho : {0.3, 1.0, 1.6}) {
        const SphericalCap cap(rng.point(), rho);
        const QuadratureGrid b = build_boundary_grid(cap, 32);
        for (int trial = 0; trial < 5; ++trial) {
            const UnitVector xi = rng.point_in(cap.center(), 0.9 * rho);
            for (const auto& fr : b.frames) {
                CHECK(std::abs(dot(fr.normal, neumann_green_deriv(cap, xi, fr.position, Deriv::grad))) < 1e-10);
            }
            const UnitVector eta = rng.point_in(cap.center(), 0.9 * rho);
            if (1.0 - dot(xi.vec(), eta.vec()) < 1e-3) continue;
            auto f = [&](const Vec3& x) { return neumann_green(cap, xi, x); };
            const Vec3 g = neumann_green_deriv(cap, xi, eta, Deriv::grad);
            CHECK(std::abs(dot(g, eta.vec())) < 1e-12);
            CHECK(testutil::max_abs_diff(g, testutil::fd_gradient(f, eta)) < 1e-6);
            // Δ* G_N = −1/‖Γ‖ away from the source.
            CHECK(beltrami_fd(f, eta, 1e-3) == doctest::Approx(-1.0 / (2 * kPi * rho)).epsilon(1e-3));
        }
    }
    SUBCASE("hemisphere drops the antipodal term") {
        const SphericalCap cap(UnitVector(0, 0, 1), 1.0);
        const UnitVector xi(0.1, 0.2, 0.9);
        const UnitVector eta(-0.3, 0.1, 0.5);
        const Reflection r = reflect(cap, xi);
        const double expected = (std::log(1 - dot(xi.vec(), eta.vec())) + std::log(r.scale * (1 - dot(r.point.vec(), eta.vec())))) / (4 * kPi);
        CHECK(neumann_green(cap, xi, eta) == doctest::Approx(expected).epsilon(1e-14));
    }
    const SphericalCap cap(UnitVector(0, 0, 1), 0.5);
    CHECK_THROWS_AS(neumann_green(cap, UnitVector(0, 0, 1), UnitVector(0, 0, -1)), SingularityError);
}

TEST_CASE("regularized kernels") {
    const SphericalCap cap(UnitVector(0.3, 0.3, 0.8), 0.7);
    const UnitVector xi = testutil::Rng(7).point_in(cap.center(), 0.3);
    const auto [e1, e2] = testutil::tangent_pair(xi);
    for (int J : {4, 8, 12}) {
        const double eps = std::ldexp(1.0, -J);
        auto at_gap = [&](double gap) { return testutil::geodesic_step(xi, e1, std::acos(1.0 - gap)); };
        const Vec3 below = at_gap(eps * (1 - 1e-12));
        const Vec3 above = at_gap(eps * (1 + 1e-12));
        CHECK(std::abs(fundamental_regularized(1 - eps * (1 - 1e-12), J) - fundamental_regularized(1 - eps * (1 + 1e-12), J)) < 1e-12);
        CHECK(std::abs(neumann_green_regularized(cap, xi, below, J) - neumann_green_regularized(cap, xi, above, J)) < 1e-12);
        CHECK(testutil::max_abs_diff(neumann_green_regularized_deriv(cap, xi, below, J, Deriv::grad),
                                     neumann_green_regularized_deriv(cap, xi, above, J, Deriv::grad)) < 1e-10);
        // Seam value of the regularized log term.
        CHECK(fundamental_regularized(1 - eps, J) == doctest::Approx((-J * std::log(2.0) + 1 - std::log(2.0)) / (4 * kPi)));
        // Finite at the source, gradient vanishes there.
        CHECK(std::isfinite(neumann_green_regularized(cap, xi, xi, J)));
        CHECK(norm(fundamental_regularized_deriv(xi, xi, J, Deriv::grad)) < 1e-10);
        // Both branches agree with finite differences.
        for (double gap : {0.5 * eps, 4.0 * eps}) {
            const UnitVector eta(at_gap(gap) + 0.3 * std::sqrt(gap) * e2);
            auto f = [&](const Vec3& x) { return neumann_green_regularized(cap, xi, x, J); };
            const double h = std::min(1e-5, 1e-3 * std::sqrt(eps));
            CHECK(testutil::max_abs_diff(neumann_green_regularized_deriv(cap, xi, eta, J, Deriv::grad),
                                         testutil::fd_gradient(f, eta, h)) < 1e-6 * std::max(1.0, std::ldexp(1.0, J) * 1e-3));
        }
    }
    // Large J reproduces the exact kernel away from the source.
    const UnitVector eta = testutil::Rng(8).point_in(cap.center(), 0.6);
    CHECK(neumann_green_regularized(cap, xi, eta, 40) == neumann_green(cap, xi, eta));
    CHECK(testutil::max_abs_diff(dirichlet_green_regularized_deriv(cap, xi, eta, 40, Deriv::curl),
                                 dirichlet_green_deriv(cap, xi, eta, Deriv::curl)) < 1e-15);
    // The reflected tail does not depend on J.
    const Vec3 tail = dirichlet_green_deriv(cap, xi, eta, Deriv::grad) - fundamental_deriv(xi, eta, Deriv::grad);
    CHECK(testutil::max_abs_diff(dirichlet_green_regularized_deriv(cap, xi, eta, 3, Deriv::grad) -
                                     fundamental_regularized_deriv(xi, eta, 3, Deriv::grad),
                                 tail) < 1e-13);
    CHECK(is_finite(dirichlet_green_regularized_deriv(cap, xi, xi, 8, Deriv::grad)));
    CHECK(fundamental_regularized(0.3, 40) == fundamental(0.3));
}

TEST_CASE("kernel specs dispatch") {
    const SphericalCap cap(UnitVector(0, 0, 1), 0.8);
    const UnitVector xi(0.1, 0.0, 0.95), eta(-0.2, 0.3, 0.9);
    CHECK(kernel_value(KernelSpec::fundamental(), xi, eta) == fundamental(dot(xi.vec(), eta.vec())));
    CHECK(kernel_value(KernelSpec::dirichlet(cap), xi, eta) == dirichlet_green(cap, xi, eta));
    CHECK(kernel_value(KernelSpec::neumann(cap), xi, eta) == neumann_green(cap, xi, eta));
    CHECK(kernel_value(KernelSpec::neumann_regularized(cap, 5), xi, eta) == neumann_green_regularized(cap, xi, eta, 5));
    CHECK(kernel_deriv(KernelSpec::neumann(cap), xi, eta, Deriv::curl) == neumann_green_deriv(cap, xi, eta, Deriv::curl));
    KernelSpec bad{KernelKind::dirichlet_cap, std::nullopt, 0};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK_THROWS_AS(KernelSpec::neumann_regularized(cap, -1).validate(), ValidationError);
}
