#include <doctest.h>

#include <cmath>

#include "sphaerica/errors.hpp"
#include "sphaerica/harmonics.hpp"
#include "sphaerica/kernels.hpp"
#include "sphaerica/solvers.hpp"
#include "test_util.hpp"

using namespace sphaerica;

namespace {

ShCoefficients beltrami_of(const ShCoefficients& c) {
    return sh_scale_degrees(c, [](int n) { return -static_cast<double>(n) * (n + 1); });
}

double cap_mean(const QuadratureGrid& g, const std::vector<double>& v) {
    return integrate(g, ScalarSamples{v}) / g.total_weight();
}

}  // namespace

TEST_CASE("finite-difference Beltrami probe") {
    testutil::Rng rng(1);
    for (int n = 0; n <= 10; ++n) {
        for (int j : {1, 2 * n + 1}) {
            const ShCoefficients c = ShCoefficients::unit(n, j);
            auto f = [&](const Vec3& x) { return sh_eval(c, UnitVector(x)); };
            for (int k = 0; k < 3; ++k) {
                const UnitVector xi = rng.point();
                const double y = sh_eval(c, xi);
                if (std::abs(y) < 0.05) continue;
                CHECK(std::abs(beltrami_fd(f, xi, 1e-3) + n * (n + 1.0) * y) < 1e-3 * std::max(1.0, n * (n + 1.0) * std::abs(y)));
            }
        }
    }
    const UnitVector xi(0.3, 0.5, -0.2);
    CHECK(std::abs(beltrami_fd([](const Vec3&) { return 2.0; }, xi)) < 1e-8);
    const Vec3 a{0.2, -0.4, 0.9};
    CHECK(std::abs(beltrami_fd([&](const Vec3& x) { return dot(x, a); }, xi) + 2.0 * dot(xi.vec(), a)) < 1e-4);
    CHECK_THROWS_AS(beltrami_fd([](const Vec3&) { return 0.0; }, xi, 0.1), ValidationError);
}

TEST_CASE("surface potential on the sphere") {
    const QuadratureGrid g = build_sphere_grid(64, 128);
    const int J = 12;
    const ShCoefficients c = ShCoefficients::unit(2, 3);
    const ScalarSamples H = sample(g, [&](const UnitVector& e) { return sh_eval(c, e); });
    double err_plain = 0.0, err_jet = 0.0;
    for (std::size_t i = 0; i < g.size(); i += 211) {
        const UnitVector& xi = g.nodes[i];
        const double expected = -sh_eval(c, xi) / 6.0;
        err_plain = std::max(err_plain, std::abs(surface_potential(g, H, xi, J) - expected));
        err_jet = std::max(err_jet, std::abs(surface_potential(g, H, xi, J, estimate_jet(g, H, i)) - expected));
    }
    CHECK(err_plain < 1e-4);
    CHECK(err_jet < 1e-6);

    // Constant density: G has zero mean. Checked on a grid centred at ξ.
    const UnitVector xi(0.1, -0.7, 0.2);
    const QuadratureGrid centred = build_sphere_grid(64, 128, xi, 3);
    const ScalarSamples ones = sample(centred, [](const UnitVector&) { return 1.0; });
    CHECK(std::abs(surface_potential(centred, ones, xi, 40)) < 1e-10);
    CHECK_THROWS_AS(surface_potential(build_cap_grid(SphericalCap(xi, 0.5), 8, 16), ones, xi, J, LocalJet{}), ValidationError);
}

TEST_CASE("surface potential on a cap, exterior point") {
    const SphericalCap cap(UnitVector(0, 0.2, 1), 0.4);
    const QuadratureGrid g = build_cap_grid(cap, 48, 96);
    const ShCoefficients c = synth_field(3, 0, 5, 1.0);
    const ScalarSamples H = sample(g, [&](const UnitVector& e) { return sh_eval(c, e); });
    const double total = integrate(g, H);
    for (const UnitVector& xi : {UnitVector(1, 0, 0), UnitVector(0, -1, -0.2), UnitVector(0.3, 0.2, -1)}) {
        auto U = [&](const Vec3& x) { return surface_potential(g, H, x, 12); };
        CHECK(beltrami_fd(U, xi, 1e-3) == doctest::Approx(-total / (4 * kPi)).epsilon(1e-3));
    }
}

TEST_CASE("Poisson problem on a cap") {
    const SphericalCap cap(UnitVector(0.2, 0.3, 0.9), 0.5);
    const UnitVector xi_bar = -cap.center();
    SUBCASE("zero source") {
        const QuadratureGrid g = build_cap_grid(cap, 16, 32);
        const ScalarSamples zero{std::vector<double>(g.size(), 0.0)};
        CHECK(poisson_solve_cap(g, zero, xi_bar, cap.center(), 10) == 0.0);
    }
    SUBCASE("mean-free source needs no correction") {
        const QuadratureGrid g = build_cap_grid(cap, 24, 48);
        ScalarSamples H = sample(g, [&](const UnitVector& e) { return std::sin(4 * e.x()) + e.y(); });
        const double mean = integrate(g, H) / g.total_weight();
        for (double& v : H.values) v -= mean;
        const UnitVector xi = testutil::Rng(2).point_in(cap.center(), 0.3);
        CHECK(poisson_solve_cap(g, H, xi_bar, xi, 10) == doctest::Approx(surface_potential(g, H, xi, 10)).epsilon(1e-9));
    }
    SUBCASE("Beltrami of the solution reproduces the source") {
        const ShCoefficients y = ShCoefficients::unit(2, 1);
        const ShCoefficients src = beltrami_of(y);
        const QuadratureGrid g = build_cap_grid(cap, 600, 1200);
        const ScalarSamples H = sample(g, [&](const UnitVector& e) { return sh_eval(src, e); });
        const QuadratureGrid probes = build_cap_grid(cap.shrunk(0.8), 2, 4);
        double worst = 0.0;
        for (const auto& p : probes.nodes) {
            auto U = [&](const Vec3& x) { return poisson_solve_cap(g, H, xi_bar, x, 12); };
            worst = std::max(worst, std::abs(beltrami_fd(U, p, 1e-2) - sh_eval(src, p)));
        }
        CHECK(worst < 2e-3);
    }
    SUBCASE("auxiliary point must be outside") {
        const QuadratureGrid g = build_cap_grid(cap, 8, 16);
        const ScalarSamples zero{std::vector<double>(g.size(), 0.0)};
        CHECK_THROWS_AS(poisson_solve_cap(g, zero, cap.center(), cap.center(), 10), ValidationError);
    }
}

TEST_CASE("Dirichlet problem on a cap") {
    testutil::Rng rng(3);
    for (double rho : {0.5, 0.9, 1.3}) {
        const SphericalCap cap(rng.point(), rho);
        const QuadratureGrid b = build_boundary_grid(cap, 512);
        const ScalarSamples ones{std::vector<double>(b.size(), 1.0)};
        for (int i = 0; i < 10; ++i) {
            CHECK(std::abs(dirichlet_solve_cap(b, ones, rng.point_in(cap.center(), 0.9 * rho)) - 1.0) < 1e-12);
        }
        for (int n = 0; n <= 5; ++n) {
            for (int k = 1; k <= (n == 0 ? 1 : 2); ++k) {
                const InnerHarmonicIndex idx{cap, n, k};
                ScalarSamples F;
                for (const auto& p : b.nodes) F.values.push_back(inner_harmonic_eval(idx, p));
                for (int i = 0; i < 10; ++i) {
                    const UnitVector xi = rng.point_in(cap.center(), 0.9 * rho);
                    CHECK(std::abs(dirichlet_solve_cap(b, F, xi) - inner_harmonic_eval(idx, xi)) < 1e-8);
                }
                // At the centre the solver is the boundary mean value formula.
                const double mvp = integrate(b, F) / (2 * kPi * cap.boundary_radius());
                CHECK(dirichlet_solve_cap(b, F, cap.center()) == doctest::Approx(mvp).epsilon(1e-13));
            }
        }
        CHECK_THROWS_AS(dirichlet_solve_cap(b, ones, b.nodes[0]), ValidationError);
    }
}

TEST_CASE("Neumann problem on a cap") {
    const double rho = 0.9;
    const SphericalCap cap(UnitVector(-0.3, 0.2, 0.8), rho);
    const QuadratureGrid b = build_boundary_grid(cap, 512);
    const QuadratureGrid area = build_cap_grid(cap, 64, 128);
    const QuadratureGrid probes = build_cap_grid(cap.shrunk(0.9), 6, 12);
    const ScalarSamples zero{std::vector<double>(b.size(), 0.0)};
    CHECK(neumann_solve_cap(b, zero, 0.37, cap.center()) == 0.37);

    for (int n = 1; n <= 3; ++n) {
        const InnerHarmonicIndex idx{cap, n, 1};
        ScalarSamples F;
        for (const auto& fr : b.frames) F.values.push_back(dot(fr.normal, inner_harmonic_grad(idx, fr.position)));
        const double mean = integrate(area, sample(area, [&](const UnitVector& e) { return inner_harmonic_eval(idx, e); })) /
                            area.total_weight();
        double worst = 0.0;
        for (const auto& p : probes.nodes) worst = std::max(worst, std::abs(neumann_solve_cap(b, F, mean, p) - inner_harmonic_eval(idx, p)));
        CHECK(worst < 1e-7);
        const UnitVector xi = probes.nodes[5];
        CHECK(neumann_solve_cap(b, F, mean + 2.5, xi) - neumann_solve_cap(b, F, mean, xi) == doctest::Approx(2.5).epsilon(1e-14));
    }
    const ScalarSamples ones{std::vector<double>(b.size(), 1.0)};
    CHECK_THROWS_AS(neumann_solve_cap(b, ones, 0.0, cap.center()), ValidationError);
}

TEST_CASE("gradient and curl inversion on a cap") {
    const SphericalCap cap(UnitVector(0.2, 0.3, 0.9), 0.5);
    const Vec3 a{0.3, -0.7, 0.5};
    const QuadratureGrid g = build_cap_grid(cap, 120, 240);
    const QuadratureGrid probes = build_cap_grid(cap.shrunk(0.8), 8, 16);
    std::vector<double> exact;
    for (const auto& p : probes.nodes) exact.push_back(dot(a, p.vec()));
    const double exact_mean = cap_mean(probes, exact);

    for (Deriv mode : {Deriv::grad, Deriv::curl}) {
        const VectorSamples f = sample_vector(g, [&](const UnitVector& e) {
            const Vec3 grad = project_tangent(a, e.vec());
            return mode == Deriv::grad ? grad : cross(e.vec(), grad);
        }, true);
        auto error_at = [&](int J) {
            std::vector<double> rec;
            for (const auto& p : probes.nodes) rec.push_back(invert_gradient(g, f, mode, J, p));
            const double m = cap_mean(probes, rec);
            double worst = 0.0;
            for (std::size_t i = 0; i < rec.size(); ++i) worst = std::max(worst, std::abs(rec[i] - m - (exact[i] - exact_mean)));
            return worst;
        };
        const double e8 = error_at(8), e10 = error_at(10), e12 = error_at(12);
        CHECK(e10 < 1e-3);
        CHECK(e12 < e10);
        CHECK(e10 < e8);
    }
    const VectorSamples zero = sample_vector(g, [](const UnitVector&) { return Vec3{}; }, true);
    CHECK(invert_gradient(g, zero, Deriv::grad, 10, cap.center()) == 0.0);
    const VectorSamples radial = sample_vector(g, [](const UnitVector& e) { return e.vec(); }, true);
    CHECK_THROWS_AS(invert_gradient(g, radial, Deriv::grad, 10, cap.center()), ValidationError);
}

TEST_CASE("local jets from product-grid samples") {
    const QuadratureGrid g = build_sphere_grid(64, 128);
    const ShCoefficients c = synth_field(4, 0, 4, 1.0);
    const ScalarSamples H = sample(g, [&](const UnitVector& e) { return sh_eval(c, e); });
    const VectorSamples f = sample_vector(g, [&](const UnitVector& e) { return sh_curl_eval(c, e); }, true);
    for (std::size_t i : {std::size_t{0}, std::size_t{70}, g.size() / 2 + 5, g.size() - 1}) {
        const LocalJet jet = estimate_jet(g, H, i);
        CHECK(jet.value == H.values[i]);
        CHECK(testutil::max_abs_diff(jet.gradient, sh_grad_eval(c, g.nodes[i])) < 2e-3);
        const TangentJet tj = estimate_jet(g, f, i);
        auto fa = [&](const Vec3& x) { return sh_curl_eval(c, UnitVector(x)); };
        const Vec3& xi = g.nodes[i].vec();
        const double h = 1e-5;
        const Vec3 d1 = (fa(testutil::geodesic_step(xi, tj.e1, h)) - fa(testutil::geodesic_step(xi, tj.e1, -h))) / (2 * h);
        CHECK(testutil::max_abs_diff(tj.d1, d1) < 2e-2);
    }
    CHECK_THROWS_AS(estimate_jet(build_cap_grid(SphericalCap(UnitVector(0, 0, 1), 0.5), 8, 16), ScalarSamples{std::vector<double>(8 * 16, 0.0)}, 0),
                    ValidationError);
}

TEST_CASE("gradient and curl inversion on the sphere") {
    const QuadratureGrid g = build_sphere_grid(64, 128);
    const ShCoefficients c = ShCoefficients::unit(3, 4);
    for (Deriv mode : {Deriv::grad, Deriv::curl}) {
        const VectorSamples f = sample_vector(g, [&](const UnitVector& e) {
            return mode == Deriv::grad ? sh_grad_eval(c, e) : sh_curl_eval(c, e);
        }, true);
        double plain = 0.0, jet = 0.0;
        for (std::size_t i = 0; i < g.size(); i += 97) {
            const double exact = sh_eval(c, g.nodes[i]);
            plain = std::max(plain, std::abs(invert_gradient(g, f, mode, 12, g.nodes[i]) - exact));
            jet = std::max(jet, std::abs(invert_gradient(g, f, mode, 12, g.nodes[i], estimate_jet(g, f, i)) - exact));
        }
        CHECK(plain < 1e-2);
        CHECK(jet < 1e-5);
    }
}

TEST_CASE("mean value properties") {
    const SphericalCap host(UnitVector(0.1, 0.1, 1.0), 0.9);
    const UnitVector probe_center = testutil::Rng(5).point_in(host.center(), 0.5);
    auto constant = [](const Vec3&) { return 4.0; };
    CHECK(mvp_residual(constant, SphericalCap(probe_center, 0.3), MeanValueKind::area_and_boundary) < 1e-12);
    CHECK(mvp_residual(constant, SphericalCap(probe_center, 0.3), MeanValueKind::boundary) < 1e-12);
    const InnerHarmonicIndex idx{host, 3, 1};
    auto h = [&](const Vec3& x) { return inner_harmonic_eval(idx, UnitVector(x)); };
    CHECK(mvp_residual(h, SphericalCap(probe_center, 0.05), MeanValueKind::area_and_boundary) < 1e-10);
    CHECK(mvp_residual(h, SphericalCap(probe_center, 0.05), MeanValueKind::boundary) < 1e-10);
    const Vec3 a{0.5, 0.5, -0.2};
    auto sq = [&](const Vec3& x) { return dot(x, a) * dot(x, a); };
    CHECK(mvp_residual(sq, SphericalCap(probe_center, 0.3), MeanValueKind::area_and_boundary) > 1e-6);
    CHECK(mvp_residual(sq, SphericalCap(probe_center, 0.3), MeanValueKind::boundary) > 1e-6);
}

TEST_CASE("inner harmonics are harmonic (mean value property)") {
    testutil::Rng rng(6);
    double worst = 0.0;
    for (double rho : {0.5, 0.9, 1.3}) {
        const SphericalCap host(rng.point(), rho);
        for (int trial = 0; trial < 10; ++trial) {
            const UnitVector c = rng.point_in(host.center(), 0.8 * rho);
            const SphericalCap probe(c, 0.2 * rho);
            for (int n = 0; n <= 5; ++n) {
                for (int k = 1; k <= (n == 0 ? 1 : 2); ++k) {
                    const InnerHarmonicIndex idx{host, n, k};
                    auto h = [&](const Vec3& x) { return inner_harmonic_eval(idx, UnitVector(x)); };
                    worst = std::max(worst, mvp_residual(h, probe, MeanValueKind::boundary));
                }
            }
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("maximum principle") {
    const SphericalCap cap(UnitVector(-0.5, 0.2, 0.4), 0.7);
    for (int n = 0; n <= 5; ++n) {
        const InnerHarmonicIndex idx{cap, n, n == 0 ? 1 : 2};
        CHECK(max_principle_check([&](const Vec3& x) { return inner_harmonic_eval(idx, UnitVector(x)); }, cap, 24, 48, 256));
    }
    CHECK(max_principle_check([](const Vec3&) { return 1.5; }, cap, 8, 16, 64));
    // A function peaking at the centre fails.
    CHECK_FALSE(max_principle_check([&](const Vec3& x) { return dot(x, cap.center().vec()); }, cap, 8, 16, 64));
}

TEST_CASE("Green formulas on a cap") {
    const SphericalCap cap(UnitVector(0.3, -0.2, 0.9), 0.8);
    const QuadratureGrid area = build_cap_grid(cap, 64, 128);
    const QuadratureGrid b = build_boundary_grid(cap, 512);
    const ShCoefficients U = synth_field(21, 0, 6, 1.0);
    const ShCoefficients V = synth_field(22, 0, 6, 1.0);
    const ShCoefficients lapU = beltrami_of(U), lapV = beltrami_of(V);

    SUBCASE("divergence theorem with the normal and the tangent") {
        // f = ∇*U + L*V: the normal flux sees only U, the tangential flux only V.
        const double lhs_nu = integrate(area, sample(area, [&](const UnitVector& e) { return sh_eval(lapU, e); }));
        std::vector<double> nu_f, tau_f;
        for (const auto& fr : b.frames) {
            const Vec3 f = sh_grad_eval(U, fr.position) + sh_curl_eval(V, fr.position);
            nu_f.push_back(dot(fr.normal, f));
            tau_f.push_back(dot(fr.tangent, f));
        }
        CHECK(std::abs(lhs_nu - integrate(b, ScalarSamples{nu_f})) < 1e-8);
        const double lhs_tau = integrate(area, sample(area, [&](const UnitVector& e) { return sh_eval(lapV, e); }));
        CHECK(std::abs(lhs_tau - integrate(b, ScalarSamples{tau_f})) < 1e-8);
    }
    SUBCASE("second Green formula") {
        const double lhs = integrate(area, sample(area, [&](const UnitVector& e) {
            return sh_eval(U, e) * sh_eval(lapV, e) - sh_eval(V, e) * sh_eval(lapU, e);
        }));
        std::vector<double> rhs;
        for (const auto& fr : b.frames) {
            rhs.push_back(sh_eval(U, fr.position) * dot(fr.normal, sh_grad_eval(V, fr.position)) -
                          sh_eval(V, fr.position) * dot(fr.normal, sh_grad_eval(U, fr.position)));
        }
        CHECK(std::abs(lhs - integrate(b, ScalarSamples{rhs})) < 1e-7);
    }
    SUBCASE("representation formula") {
        const ShCoefficients F = synth_field(23, 0, 4, 1.0);
        const ShCoefficients lapF = beltrami_of(F);
        const QuadratureGrid fine = build_cap_grid(cap, 128, 256);
        const ScalarSamples lap = sample(fine, [&](const UnitVector& e) { return sh_eval(lapF, e); });
        const double mean_term = integrate(fine, sample(fine, [&](const UnitVector& e) { return sh_eval(F, e); })) / (4 * kPi);
        testutil::Rng rng(24);
        for (int i = 0; i < 5; ++i) {
            const UnitVector xi = rng.point_in(cap.center(), 0.6);
            const double surface = surface_potential(fine, lap, xi, 12);
            const double line = weighted_sum(b.weights, [&](std::size_t j) {
                const BoundaryPoint& fr = b.frames[j];
                return sh_eval(F, fr.position) * fundamental_normal(xi, fr) -
                       fundamental(dot(xi.vec(), fr.position.vec())) * dot(fr.normal, sh_grad_eval(F, fr.position));
            });
            // limited by the O(2^-J) bias of the regularized potential
            CHECK(std::abs(mean_term + surface + line - sh_eval(F, xi)) < 5e-4);
        }
    }
}

TEST_CASE("default regularization scale follows the grid") {
    const QuadratureGrid coarse = build_cap_grid(SphericalCap(UnitVector(0, 0, 1), 0.5), 16, 32);
    const QuadratureGrid fine = build_cap_grid(SphericalCap(UnitVector(0, 0, 1), 0.5), 64, 128);
    CHECK(default_scale(fine) == default_scale(coarse) + 2);
    CHECK(default_scale(build_sphere_grid(64, 128)) == static_cast<int>(std::ceil(std::log2(64 / kPi))) + 2);
}

TEST_CASE("evaluate_points keeps probe order") {
    std::vector<UnitVector> probes;
    for (int i = 0; i < 50; ++i) probes.push_back(UnitVector(1.0, 0.01 * i, 0.0));
    const auto v = evaluate_points(probes, [](const UnitVector& p) { return p.y(); });
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
}
