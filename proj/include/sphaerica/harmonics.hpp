#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sphaerica/geometry.hpp"
#include "sphaerica/quadrature.hpp"

namespace sphaerica {

inline constexpr int kMaxShDegree = 128;

/// Coefficients c_{n,j}, 0 ≤ n ≤ L, 1 ≤ j ≤ 2n+1, of real orthonormal
/// spherical harmonics (∫ Y_{n,j}² dω = 1, no Condon-Shortley phase).
///
/// Order index j: j = 1 is the zonal term, j = 2m is the cos(mφ) term and
/// j = 2m+1 the sin(mφ) term for 1 ≤ m ≤ n.
class ShCoefficients {
public:
    ShCoefficients() = default;
    explicit ShCoefficients(int max_degree);

    int max_degree() const { return max_degree_; }

    static std::size_t index(int n, int j) { return static_cast<std::size_t>(n * n + j - 1); }

    double& operator()(int n, int j) { return data_.at(index(n, j)); }
    double operator()(int n, int j) const { return data_.at(index(n, j)); }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// A single basis function Y_{n,j}.
    static ShCoefficients unit(int n, int j);

    std::uint64_t seed = 0;  ///< provenance when produced by synth_field

private:
    int max_degree_ = 0;
    std::vector<double> data_ = std::vector<double>(1, 0.0);
};

ShCoefficients operator+(const ShCoefficients& a, const ShCoefficients& b);
ShCoefficients operator*(double s, const ShCoefficients& a);

double sh_eval(const ShCoefficients& c, const Vec3& xi);

/// Surface gradient ∇*(Σ c Y)(ξ); tangential at ξ.
Vec3 sh_grad_eval(const ShCoefficients& c, const Vec3& xi);

/// Surface curl gradient L* = ξ × ∇*.
Vec3 sh_curl_eval(const ShCoefficients& c, const Vec3& xi);

/// Seeded field with uniform c_{n,j} ∈ [−1, 1] scaled by (n+1)^(−decay) for n_min ≤ n ≤ n_max.
ShCoefficients synth_field(std::uint64_t seed, int n_min, int n_max, double decay_exponent = 2.0);

/// Projects samples on a sphere grid onto degrees ≤ max_degree by quadrature.
ShCoefficients sh_analyze(const QuadratureGrid& sphere_grid, const ScalarSamples& samples, int max_degree);

/// Multiplies each degree-n block by factor(n).
template <class Factor>
ShCoefficients sh_scale_degrees(const ShCoefficients& c, Factor&& factor) {
    ShCoefficients out = c;
    for (int n = 0; n <= c.max_degree(); ++n) {
        const double f = factor(n);
        for (int j = 1; j <= 2 * n + 1; ++j) out(n, j) *= f;
    }
    return out;
}

/// H_{n,k}^{ρ,ζ}: order k = 1 (cosine) or 2 (sine, requires n ≥ 1).
struct InnerHarmonicIndex {
    SphericalCap cap;
    int degree = 0;
    int order = 1;
};

/// Planar inner harmonic (1/(R√π))(r/R)ⁿ cos(nφ) or sin(nφ) pulled back by
/// stereographic projection, with R = (ρ(2−ρ))^{1/4}.
double inner_harmonic_eval(const InnerHarmonicIndex& idx, const Vec3& xi);
Vec3 inner_harmonic_grad(const InnerHarmonicIndex& idx, const Vec3& xi);

/// Partial sum of the expansion of ln(1 − ξ·η) in products of inner
/// harmonics of Γ_ρ(ζ) and its complement, truncated after degree N.
/// Requires |p(ζ;ξ)| < |p(ζ;η)|.
double log_series(const Vec3& xi, const Vec3& eta, const UnitVector& zeta, double rho, int max_degree);

}  // namespace sphaerica
