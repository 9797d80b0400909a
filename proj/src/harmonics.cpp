#include "sphaerica/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include "sphaerica/errors.hpp"

namespace sphaerica {

ShCoefficients::ShCoefficients(int max_degree) : max_degree_(max_degree) {
    if (max_degree < 0 || max_degree > kMaxShDegree) {
        throw ValidationError("ShCoefficients: degree must lie in [0, " + std::to_string(kMaxShDegree) + "]");
    }
    data_.assign(static_cast<std::size_t>((max_degree + 1) * (max_degree + 1)), 0.0);
}

ShCoefficients ShCoefficients::unit(int n, int j) {
    if (j < 1 || j > 2 * n + 1) throw ValidationError("ShCoefficients::unit: order index out of range");
    ShCoefficients c(n);
    c(n, j) = 1.0;
    return c;
}

ShCoefficients operator+(const ShCoefficients& a, const ShCoefficients& b) {
    const ShCoefficients& big = a.max_degree() >= b.max_degree() ? a : b;
    const ShCoefficients& small = a.max_degree() >= b.max_degree() ? b : a;
    ShCoefficients out = big;
    for (std::size_t i = 0; i < small.data().size(); ++i) out.data()[i] += small.data()[i];
    return out;
}

ShCoefficients operator*(double s, const ShCoefficients& a) {
    ShCoefficients out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

namespace {

// Fully normalized associated Legendre functions p̄_{n,m}(cos θ) and their
// quotients q̄_{n,m} = p̄_{n,m}/sin θ (m ≥ 1), computed without dividing by sin θ.
struct LegendreTable {
    int L;
    std::vector<double> p;
    std::vector<double> q;

    LegendreTable(int max_degree, double t, double s) : L(max_degree) {
        const auto dim = static_cast<std::size_t>((L + 1) * (L + 1));
        p.assign(dim, 0.0);
        q.assign(dim, 0.0);
        at(p, 0, 0) = 1.0 / std::sqrt(4.0 * kPi);
        for (int m = 0; m <= L; ++m) {
            if (m > 0) {
                const double f = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
                at(q, m, m) = f * at(p, m - 1, m - 1);
                at(p, m, m) = s * at(q, m, m);
            }
            if (m + 1 <= L) {
                const double f = std::sqrt(2.0 * m + 3.0);
                at(p, m + 1, m) = f * t * at(p, m, m);
                at(q, m + 1, m) = f * t * at(q, m, m);
            }
            for (int n = m + 2; n <= L; ++n) {
                const double a = std::sqrt((4.0 * n * n - 1.0) / (static_cast<double>(n) * n - m * m));
                const double b = std::sqrt(((n - 1.0) * (n - 1.0) - m * m) / (4.0 * (n - 1.0) * (n - 1.0) - 1.0));
                at(p, n, m) = a * (t * at(p, n - 1, m) - b * at(p, n - 2, m));
                at(q, n, m) = a * (t * at(q, n - 1, m) - b * at(q, n - 2, m));
            }
        }
    }

    double& at(std::vector<double>& v, int n, int m) { return v[static_cast<std::size_t>(n * (L + 1) + m)]; }
    double get(const std::vector<double>& v, int n, int m) const {
        if (n < m || n > L) return 0.0;
        return v[static_cast<std::size_t>(n * (L + 1) + m)];
    }

    // d p̄_{n,m}/dθ
    double dtheta(int n, int m, double t) const {
        if (m == 0) {
            return n == 0 ? 0.0 : -std::sqrt(static_cast<double>(n) * (n + 1.0)) * get(p, n, 1);
        }
        const double c = std::sqrt((2.0 * n + 1.0) * (static_cast<double>(n) * n - m * m) / (2.0 * n - 1.0));
        return n * t * get(q, n, m) - c * get(q, n - 1, m);
    }
};

struct SphericalAngles {
    double t, s, phi;
    Vec3 e_theta, e_phi;
};

SphericalAngles angles_of(const Vec3& xi) {
    SphericalAngles a;
    a.t = std::clamp(xi.z, -1.0, 1.0);
    a.s = std::hypot(xi.x, xi.y);
    a.phi = std::atan2(xi.y, xi.x);
    const double cp = std::cos(a.phi), sp = std::sin(a.phi);
    a.e_theta = {a.t * cp, a.t * sp, -a.s};
    a.e_phi = {-sp, cp, 0.0};
    return a;
}

}  // namespace

double sh_eval(const ShCoefficients& c, const Vec3& xi) {
    const SphericalAngles a = angles_of(xi);
    const int L = c.max_degree();
    const LegendreTable leg(L, a.t, a.s);
    const double root2 = std::sqrt(2.0);
    double acc = 0.0;
    for (int n = 0; n <= L; ++n) {
        acc += c(n, 1) * leg.get(leg.p, n, 0);
        for (int m = 1; m <= n; ++m) {
            const double pm = root2 * leg.get(leg.p, n, m);
            acc += pm * (c(n, 2 * m) * std::cos(m * a.phi) + c(n, 2 * m + 1) * std::sin(m * a.phi));
        }
    }
    return acc;
}

Vec3 sh_grad_eval(const ShCoefficients& c, const Vec3& xi) {
    const SphericalAngles a = angles_of(xi);
    const int L = c.max_degree();
    const LegendreTable leg(L, a.t, a.s);
    const double root2 = std::sqrt(2.0);
    double d_theta = 0.0;
    double d_phi = 0.0;  // (1/sin θ) ∂/∂φ
    for (int n = 1; n <= L; ++n) {
        d_theta += c(n, 1) * leg.dtheta(n, 0, a.t);
        for (int m = 1; m <= n; ++m) {
            const double cm = std::cos(m * a.phi), sm = std::sin(m * a.phi);
            const double cc = c(n, 2 * m), cs = c(n, 2 * m + 1);
            d_theta += root2 * leg.dtheta(n, m, a.t) * (cc * cm + cs * sm);
            d_phi += root2 * m * leg.get(leg.q, n, m) * (-cc * sm + cs * cm);
        }
    }
    return d_theta * a.e_theta + d_phi * a.e_phi;
}

Vec3 sh_curl_eval(const ShCoefficients& c, const Vec3& xi) { return cross(xi, sh_grad_eval(c, xi)); }

ShCoefficients synth_field(std::uint64_t seed, int n_min, int n_max, double decay_exponent) {
    if (n_min < 0 || n_max < n_min) throw ValidationError("synth_field: need 0 <= n_min <= n_max");
    ShCoefficients c(n_max);
    c.seed = seed;
    std::mt19937_64 rng(seed);
    for (int n = n_min; n <= n_max; ++n) {
        const double scale = std::pow(n + 1.0, -decay_exponent);
        for (int j = 1; j <= 2 * n + 1; ++j) {
            // 53 random bits mapped to [0, 1); portable unlike uniform_real_distribution.
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            c(n, j) = (2.0 * u - 1.0) * scale;
        }
    }
    return c;
}

ShCoefficients sh_analyze(const QuadratureGrid& sphere_grid, const ScalarSamples& samples, int max_degree) {
    if (sphere_grid.kind != GridKind::sphere_area) throw ValidationError("sh_analyze: needs a sphere grid");
    if (samples.size() != sphere_grid.size()) throw ValidationError("sh_analyze: sample count mismatch");
    ShCoefficients out(max_degree);
    const std::size_t count = out.data().size();
    // Basis values per node, then one pairwise sum per coefficient.
    std::vector<std::vector<double>> terms(count, std::vector<double>(sphere_grid.size()));
    const double root2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < sphere_grid.size(); ++i) {
        const SphericalAngles a = angles_of(sphere_grid.nodes[i]);
        const LegendreTable leg(max_degree, a.t, a.s);
        const double wv = sphere_grid.weights[i] * samples.values[i];
        for (int n = 0; n <= max_degree; ++n) {
            terms[ShCoefficients::index(n, 1)][i] = wv * leg.get(leg.p, n, 0);
            for (int m = 1; m <= n; ++m) {
                const double pm = root2 * leg.get(leg.p, n, m) * wv;
                terms[ShCoefficients::index(n, 2 * m)][i] = pm * std::cos(m * a.phi);
                terms[ShCoefficients::index(n, 2 * m + 1)][i] = pm * std::sin(m * a.phi);
            }
        }
    }
    for (std::size_t k = 0; k < count; ++k) out.data()[k] = pairwise_sum(terms[k]);
    return out;
}

namespace {

double inner_radius(double rho) { return std::pow(rho * (2.0 - rho), 0.25); }

void check_index(const InnerHarmonicIndex& idx) {
    if (idx.degree < 0 || (idx.order != 1 && idx.order != 2) || (idx.order == 2 && idx.degree == 0)) {
        throw ValidationError("inner harmonic: invalid (degree, order)");
    }
}

std::complex<double> ipow(std::complex<double> z, int n) {
    std::complex<double> r(1.0, 0.0);
    for (int i = 0; i < n; ++i) r *= z;
    return r;
}

}  // namespace

double inner_harmonic_eval(const InnerHarmonicIndex& idx, const Vec3& xi) {
    check_index(idx);
    const RotationFrame frame = rotation_to_pole(idx.cap.center());
    const PlanarPoint p = stereographic_project(frame, xi);
    const double R = inner_radius(idx.cap.radius());
    const double c = 1.0 / (R * std::sqrt(kPi));
    const std::complex<double> zn = ipow({p.x / R, p.y / R}, idx.degree);
    return c * (idx.order == 1 ? zn.real() : zn.imag());
}

Vec3 inner_harmonic_grad(const InnerHarmonicIndex& idx, const Vec3& xi) {
    check_index(idx);
    if (idx.degree == 0) {
        // still validates the antipode precondition
        (void)stereographic_project(rotation_to_pole(idx.cap.center()), xi);
        return {};
    }
    const RotationFrame frame = rotation_to_pole(idx.cap.center());
    const PlanarPoint p = stereographic_project(frame, xi);
    const double R = inner_radius(idx.cap.radius());
    const double c = 1.0 / (R * std::sqrt(kPi));
    const int n = idx.degree;
    const std::complex<double> zn1 = ipow({p.x / R, p.y / R}, n - 1);
    const double k = c * n / R;
    double dp1, dp2;
    if (idx.order == 1) {
        dp1 = k * zn1.real();
        dp2 = -k * zn1.imag();
    } else {
        dp1 = k * zn1.imag();
        dp2 = k * zn1.real();
    }
    const Vec3& zeta = frame.e3();
    const double denom = 1.0 + dot(xi, zeta);
    const Vec3 grad_p1 = 2.0 * frame.e1() / denom - 2.0 * dot(xi, frame.e1()) * zeta / (denom * denom);
    const Vec3 grad_p2 = 2.0 * frame.e2() / denom - 2.0 * dot(xi, frame.e2()) * zeta / (denom * denom);
    return project_tangent(dp1 * grad_p1 + dp2 * grad_p2, xi);
}

double log_series(const Vec3& xi, const Vec3& eta, const UnitVector& zeta, double rho, int max_degree) {
    const SphericalCap cap(zeta, rho);
    const RotationFrame frame = rotation_to_pole(zeta);
    const PlanarPoint px = stereographic_project(frame, xi);
    // Exterior factor: inner harmonic of the complementary cap Γ_{2−ρ}(−ζ),
    // projected in the frame (t ε¹, t ε², −ζ) so both factors share one azimuth.
    const RotationFrame mirrored{{frame.e1(), frame.e2(), -frame.e3()}};
    const PlanarPoint pe_out = stereographic_project(mirrored, eta);
    const PlanarPoint pe_in = stereographic_project(frame, eta);
    if (!(std::hypot(px.x, px.y) < std::hypot(pe_in.x, pe_in.y))) {
        throw ValidationError("log_series: requires |p(zeta; xi)| < |p(zeta; eta)|");
    }
    const double R = inner_radius(rho);
    const double s2 = R * R;  // √(ρ(2−ρ))
    const std::complex<double> zx(px.x / R, px.y / R);
    const std::complex<double> ze(pe_out.x / R, pe_out.y / R);
    double acc = -std::log(2.0) + std::log(1.0 + dot(xi, zeta.vec())) + std::log(1.0 - dot(eta, zeta.vec()));
    std::complex<double> pow_x(1.0, 0.0), pow_e(1.0, 0.0);
    double damping = 1.0;
    const double norm = 1.0 / (R * R * kPi);  // product of the two (1/(R√π)) prefactors
    for (int n = 1; n <= max_degree; ++n) {
        pow_x *= zx;
        pow_e *= ze;
        damping *= s2 / 4.0;
        // Σ_k H_{n,k}(ξ) H'_{n,k}(η) = norm · Re(zxⁿ · conj(zeⁿ))
        const double pair_sum = norm * (pow_x.real() * pow_e.real() + pow_x.imag() * pow_e.imag());
        acc -= s2 * kPi * (2.0 / n) * damping * pair_sum;
    }
    return acc;
}

}  // namespace sphaerica
