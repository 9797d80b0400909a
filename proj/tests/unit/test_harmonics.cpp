#include <doctest.h>

#include <cmath>

#include "sphaerica/errors.hpp"
#include "sphaerica/harmonics.hpp"
#include "test_util.hpp"

using namespace sphaerica;

TEST_CASE("spherical harmonic values") {
    const ShCoefficients c0 = ShCoefficients::unit(0, 1);
    testutil::Rng rng(1);
    for (int i = 0; i < 20; ++i) CHECK(sh_eval(c0, rng.point()) == doctest::Approx(1.0 / std::sqrt(4 * kPi)));
    for (int j = 1; j <= 3; ++j) {
        const ShCoefficients c1 = ShCoefficients::unit(1, j);
        const UnitVector p = rng.point();
        CHECK(sh_eval(c1, -p) == doctest::Approx(-sh_eval(c1, p)).epsilon(1e-14));
    }
    // Degree 1 spans the coordinate functions with norm √(3/4π).
    const double k = std::sqrt(3.0 / (4 * kPi));
    const UnitVector p(0.3, -0.4, 0.5);
    CHECK(sh_eval(ShCoefficients::unit(1, 1), p) == doctest::Approx(k * p.z()));
    CHECK(sh_eval(ShCoefficients::unit(1, 2), p) == doctest::Approx(k * p.x()));
    CHECK(sh_eval(ShCoefficients::unit(1, 3), p) == doctest::Approx(k * p.y()));
}

TEST_CASE("orthonormality on a sphere grid") {
    const QuadratureGrid g = build_sphere_grid(24, 48);
    const int L = 10;
    std::vector<ScalarSamples> y;
    std::vector<std::pair<int, int>> idx;
    for (int n = 0; n <= L; ++n) {
        for (int j = 1; j <= 2 * n + 1; ++j) {
            const ShCoefficients c = ShCoefficients::unit(n, j);
            y.push_back(sample(g, [&](const UnitVector& e) { return sh_eval(c, e); }));
            idx.emplace_back(n, j);
        }
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < y.size(); ++a) {
        for (std::size_t b = a; b < y.size(); ++b) {
            ScalarSamples prod;
            for (std::size_t i = 0; i < g.size(); ++i) prod.values.push_back(y[a].values[i] * y[b].values[i]);
            worst = std::max(worst, std::abs(integrate(g, prod) - (a == b ? 1.0 : 0.0)));
        }
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("analysis recovers synthetic coefficients") {
    const ShCoefficients c = synth_field(42, 0, 12, 1.0);
    const QuadratureGrid g = build_sphere_grid(20, 40);
    const ShCoefficients back = sh_analyze(g, sample(g, [&](const UnitVector& e) { return sh_eval(c, e); }), 12);
    for (std::size_t i = 0; i < c.data().size(); ++i) CHECK(std::abs(back.data()[i] - c.data()[i]) < 1e-12);
}

TEST_CASE("spherical harmonic gradients") {
    SUBCASE("linear function") {
        const Vec3 a{0.3, -1.2, 0.7};
        // ξ·a = √(4π/3)(a_z Y_{1,1} + a_x Y_{1,2} + a_y Y_{1,3})
        const double k = std::sqrt(4 * kPi / 3);
        ShCoefficients c(1);
        c(1, 1) = k * a.z;
        c(1, 2) = k * a.x;
        c(1, 3) = k * a.y;
        testutil::Rng rng(2);
        for (int i = 0; i < 20; ++i) {
            const UnitVector xi = rng.point();
            CHECK(testutil::max_abs_diff(sh_grad_eval(c, xi), a - dot(xi.vec(), a) * xi.vec()) < 1e-13);
        }
        CHECK(testutil::max_abs_diff(sh_grad_eval(c, UnitVector(0, 0, 1)), {a.x, a.y, 0.0}) < 1e-13);
        CHECK(testutil::max_abs_diff(sh_grad_eval(c, UnitVector(0, 0, -1)), {a.x, a.y, 0.0}) < 1e-13);
    }
    SUBCASE("constants have no gradient") {
        ShCoefficients c(3);
        c(0, 1) = 2.5;
        CHECK(norm(sh_grad_eval(c, UnitVector(0.2, 0.1, 0.9))) == 0.0);
    }
    SUBCASE("finite-difference agreement, including near the poles") {
        const ShCoefficients c = synth_field(9, 0, 12, 1.0);
        auto f = [&](const Vec3& x) { return sh_eval(c, UnitVector(x)); };
        testutil::Rng rng(4);
        for (int i = 0; i < 30; ++i) {
            const UnitVector xi = i < 2 ? UnitVector(1e-9, 0, i == 0 ? 1.0 : -1.0) : rng.point();
            const Vec3 g = sh_grad_eval(c, xi);
            CHECK(std::abs(dot(g, xi.vec())) < 1e-12);
            CHECK(testutil::max_abs_diff(g, testutil::fd_gradient(f, xi)) < 1e-6);
            CHECK(testutil::max_abs_diff(sh_curl_eval(c, xi), cross(xi.vec(), g)) < 1e-15);
        }
    }
}

TEST_CASE("synthetic fields") {
    const ShCoefficients a = synth_field(7, 3, 25, 2.0);
    const ShCoefficients b = synth_field(7, 3, 25, 2.0);
    CHECK(a.data() == b.data());
    CHECK(a.seed == 7);
    CHECK(a.max_degree() == 25);
    double biggest = 0.0;
    for (int n = 0; n <= 25; ++n) {
        for (int j = 1; j <= 2 * n + 1; ++j) {
            CHECK(std::isfinite(a(n, j)));
            if (n < 3) CHECK(a(n, j) == 0.0);
            biggest = std::max(biggest, std::abs(a(n, j)));
        }
    }
    CHECK(biggest <= 1.0);
    CHECK(biggest > 0.0);
    CHECK(synth_field(8, 3, 25, 2.0).data() != a.data());
    CHECK_THROWS_AS(synth_field(1, 4, 3), ValidationError);
    CHECK_THROWS_AS(ShCoefficients(kMaxShDegree + 1), ValidationError);
}

TEST_CASE("inner harmonics") {
    const SphericalCap cap(UnitVector(0.3, 0.2, 0.9), 0.9);
    const double R = std::pow(0.9 * 1.1, 0.25);
    testutil::Rng rng(8);
    SUBCASE("constant and vanishing cases") {
        for (int i = 0; i < 10; ++i) {
            CHECK(inner_harmonic_eval({cap, 0, 1}, rng.point_in(cap.center(), 1.5)) ==
                  doctest::Approx(1.0 / (R * std::sqrt(kPi))));
        }
        CHECK(std::abs(inner_harmonic_eval({cap, 1, 1}, cap.center())) < 1e-15);
        for (int n = 2; n <= 5; ++n) {
            CHECK(norm(inner_harmonic_grad({cap, n, 1}, cap.center())) < 1e-15);
            CHECK(norm(inner_harmonic_grad({cap, n, 2}, cap.center())) < 1e-15);
        }
    }
    SUBCASE("index validation and antipode") {
        CHECK_THROWS_AS(inner_harmonic_eval({cap, 0, 2}, cap.center()), ValidationError);
        CHECK_THROWS_AS(inner_harmonic_eval({cap, 1, 3}, cap.center()), ValidationError);
        CHECK_THROWS_AS(inner_harmonic_eval({cap, 2, 1}, -cap.center()), ValidationError);
        CHECK_THROWS_AS(inner_harmonic_grad({cap, 2, 1}, -cap.center()), ValidationError);
    }
    SUBCASE("gradient matches finite differences") {
        for (int i = 0; i < 20; ++i) {
            const UnitVector xi = rng.point_in(cap.center(), 1.2);
            for (int n = 0; n <= 4; ++n) {
                for (int k = 1; k <= (n == 0 ? 1 : 2); ++k) {
                    const InnerHarmonicIndex idx{cap, n, k};
                    const Vec3 g = inner_harmonic_grad(idx, xi);
                    CHECK(std::abs(dot(g, xi.vec())) < 1e-12);
                    auto f = [&](const Vec3& x) { return inner_harmonic_eval(idx, UnitVector(x)); };
                    CHECK(testutil::max_abs_diff(g, testutil::fd_gradient(f, xi)) < 1e-6);
                }
            }
        }
    }
    SUBCASE("tangential derivative integrates to zero around the boundary") {
        const QuadratureGrid b = build_boundary_grid(cap, 128);
        std::vector<double> v;
        for (const auto& fr : b.frames) v.push_back(dot(fr.tangent, inner_harmonic_grad({cap, 1, 1}, fr.position)));
        CHECK(std::abs(integrate(b, ScalarSamples{v})) < 1e-13);
    }
}

TEST_CASE("logarithm expansion") {
    const UnitVector zeta(0.1, -0.3, 0.9);
    const double rho = 0.9;
    const double phi = 0.4;
    const double rx = 0.9, re = 1.5;  // |p(ξ)|/|p(η)| = 0.6
    const UnitVector xi = stereographic_unproject(zeta, {rx * std::cos(phi), rx * std::sin(phi)});
    const UnitVector eta = stereographic_unproject(zeta, {re * std::cos(phi), re * std::sin(phi)});
    const double exact = std::log(1.0 - dot(xi.vec(), eta.vec()));

    const double n0 = log_series(xi, eta, zeta, rho, 0);
    CHECK(n0 == doctest::Approx(-std::log(2.0) + std::log(1 + dot(xi.vec(), zeta.vec())) +
                                std::log(1 - dot(eta.vec(), zeta.vec()))));

    double previous = std::abs(n0 - exact);
    std::vector<double> errors;
    for (int N : {5, 10, 20, 40}) {
        const double e = std::abs(log_series(xi, eta, zeta, rho, N) - exact);
        CHECK(e < previous);
        previous = e;
        errors.push_back(e);
    }
    CHECK(errors.back() < 1e-9);
    const double ratio = std::pow(errors[2] / errors[1], 1.0 / 10.0);
    CHECK(ratio == doctest::Approx(rx / re).epsilon(0.2));

    // Off-azimuth pair converges as well.
    const UnitVector eta2 = stereographic_unproject(zeta, {re * std::cos(2.0), re * std::sin(2.0)});
    CHECK(std::abs(log_series(xi, eta2, zeta, rho, 80) - std::log(1.0 - dot(xi.vec(), eta2.vec()))) < 1e-12);

    CHECK_THROWS_AS(log_series(eta, xi, zeta, rho, 5), ValidationError);
}
