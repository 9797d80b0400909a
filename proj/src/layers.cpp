#include "sphaerica/layers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "sphaerica/errors.hpp"
#include "sphaerica/kernels.hpp"
#include "sphaerica/parallel.hpp"

namespace sphaerica {

namespace {

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);
constexpr std::size_t kMaxUpsampled = std::size_t{1} << 22;

using Spectrum = std::vector<std::complex<double>>;

const QuadratureGrid& checked_grid(const DensitySamples& q, const char* who) {
    if (!q.grid || q.grid->kind != GridKind::boundary_line || !q.grid->cap) {
        throw ValidationError(std::string(who) + ": density must live on a cap boundary grid");
    }
    if (q.values.size() != q.grid->size()) throw ValidationError(std::string(who) + ": density size mismatch");
    return *q.grid;
}

double node_spacing(const QuadratureGrid& g) {
    return 2.0 * g.cap->boundary_radius() * std::sin(kPi / static_cast<double>(g.size()));
}

void require_off_curve(const QuadratureGrid& g, const Vec3& xi, const char* who) {
    const double h = node_spacing(g);
    for (const auto& node : g.nodes) {
        if (norm(xi - node.vec()) <= h) {
            throw ValidationError(std::string(who) + ": evaluation point closer to the curve than one node spacing");
        }
    }
}

// −(1/4π)(n·a)/(1 − a·b) for boundary points a ≠ b and a unit normal n at b,
// written with n·b = 0 and 1 − a·b = |a − b|²/2 to keep nearby pairs accurate.
double normal_kernel(const Vec3& a, const Vec3& b, const Vec3& n) {
    const Vec3 d = a - b;
    return -kInv4Pi * dot(n, d) / (0.5 * dot(d, d));
}

Spectrum forward(const std::vector<double>& x) {
    Eigen::FFT<double> fft;
    Spectrum in(x.begin(), x.end()), out;
    fft.fwd(out, in);
    return out;
}

std::vector<double> inverse_real(const Spectrum& X) {
    Eigen::FFT<double> fft;
    Spectrum out;
    fft.inv(out, X);
    std::vector<double> r(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) r[i] = out[i].real();
    return r;
}

// Signed frequency of DFT bin k for length m; the Nyquist bin counts as +m/2.
long frequency(std::size_t k, std::size_t m) {
    return 2 * k <= m ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(m);
}

std::vector<double> upsample(const std::vector<double>& x, std::size_t M) {
    const std::size_t m = x.size();
    const Spectrum X = forward(x);
    Spectrum Y(M, {0.0, 0.0});
    for (std::size_t k = 0; k < m; ++k) {
        const long f = frequency(k, m);
        if (m % 2 == 0 && 2 * k == m) {
            Y[m / 2] += 0.5 * X[k];
            Y[M - m / 2] += 0.5 * X[k];
        } else {
            Y[f >= 0 ? static_cast<std::size_t>(f) : M - static_cast<std::size_t>(-f)] = X[k];
        }
    }
    std::vector<double> y = inverse_real(Y);
    const double scale = static_cast<double>(M) / static_cast<double>(m);
    for (double& v : y) v *= scale;
    return y;
}

double extrapolate_to_zero(const double* t, const double* d) {
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        double l = 1.0;
        for (int j = 0; j < 3; ++j) {
            if (j != i) l *= -t[j] / (t[i] - t[j]);
        }
        sum += l * d[i];
    }
    return sum;
}

std::vector<double> apply_boundary_operator(const DensitySamples& q, bool adjoint) {
    const QuadratureGrid& g = checked_grid(q, "layer on boundary");
    const double diag = double_layer_diagonal(*g.cap);
    std::vector<double> out(g.size());
    parallel_for(g.size(), [&](std::size_t i) {
        out[i] = weighted_sum(g.weights, [&](std::size_t j) {
            if (i == j) return diag * q.values[j];
            const Vec3& xi = g.nodes[i].vec();
            const Vec3& eta = g.nodes[j].vec();
            const double k = adjoint ? normal_kernel(eta, xi, g.frames[i].normal) : normal_kernel(xi, eta, g.frames[j].normal);
            return k * q.values[j];
        });
    });
    return out;
}

void require_boundary(const QuadratureGrid& g, std::size_t n, const char* who) {
    if (g.kind != GridKind::boundary_line || !g.cap) throw ValidationError(std::string(who) + ": needs a cap boundary grid");
    if (n != g.size()) throw ValidationError(std::string(who) + ": sample count does not match the grid");
}

double max_abs(const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

}  // namespace

DensitySamples make_density(std::shared_ptr<const QuadratureGrid> boundary_grid, std::vector<double> values,
                            bool mean_free) {
    DensitySamples q{std::move(boundary_grid), std::move(values), mean_free};
    const QuadratureGrid& g = checked_grid(q, "make_density");
    if (mean_free) {
        const double total = integrate(g, ScalarSamples{q.values});
        if (std::abs(total) >= kMeanFreeTol) {
            throw ValidationError("make_density: density flagged mean-free has integral " + std::to_string(total));
        }
    }
    return q;
}

double single_layer(const DensitySamples& q, const Vec3& xi) {
    const QuadratureGrid& g = checked_grid(q, "single_layer");
    require_off_curve(g, xi, "single_layer");
    return weighted_sum(g.weights, [&](std::size_t i) { return fundamental(dot(xi, g.nodes[i].vec())) * q.values[i]; });
}

double double_layer(const DensitySamples& q, const Vec3& xi) {
    const QuadratureGrid& g = checked_grid(q, "double_layer");
    require_off_curve(g, xi, "double_layer");
    return weighted_sum(g.weights, [&](std::size_t i) { return fundamental_normal(xi, g.frames[i]) * q.values[i]; });
}

double double_layer_diagonal(const SphericalCap& cap) {
    return kInv4Pi * (1.0 - cap.radius()) / cap.boundary_radius();
}

std::vector<double> double_layer_kernel_matrix(const QuadratureGrid& boundary_grid) {
    require_boundary(boundary_grid, boundary_grid.size(), "double_layer_kernel_matrix");
    const std::size_t m = boundary_grid.size();
    const double diag = double_layer_diagonal(*boundary_grid.cap);
    std::vector<double> K(m * m);
    parallel_for(m, [&](std::size_t i) {
        for (std::size_t j = 0; j < m; ++j) {
            K[i * m + j] = i == j ? diag
                                  : normal_kernel(boundary_grid.nodes[i].vec(), boundary_grid.nodes[j].vec(),
                                                  boundary_grid.frames[j].normal);
        }
    });
    return K;
}

std::vector<double> double_layer_on_boundary(const DensitySamples& q) { return apply_boundary_operator(q, false); }

std::vector<double> single_layer_normal_on_boundary(const DensitySamples& q) { return apply_boundary_operator(q, true); }

std::vector<double> single_layer_on_boundary(const DensitySamples& q) {
    const QuadratureGrid& g = checked_grid(q, "single_layer_on_boundary");
    // On the curve 1 − ξ·η = (s²/2)·4sin²(δ/2); ln(4sin²(δ/2)) has Fourier multiplier −2π/|k|.
    const double s = g.cap->boundary_radius();
    const std::size_t m = g.size();
    Spectrum X = forward(q.values);
    for (std::size_t k = 0; k < m; ++k) {
        const long f = std::labs(frequency(k, m));
        X[k] *= f == 0 ? 0.5 * s * (std::log(0.25 * s * s) + 1.0) : -0.5 * s / static_cast<double>(f);
    }
    return inverse_real(X);
}

JumpReport jump_probe(LayerKind layer, JumpQuantity quantity, const DensitySamples& q, std::size_t node,
                      const std::vector<double>& taus) {
    const QuadratureGrid& g = checked_grid(q, "jump_probe");
    if (node >= g.size()) throw ValidationError("jump_probe: node index out of range");
    if (taus.size() < 3) throw ValidationError("jump_probe: need at least three displacements");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!(taus[i] > 0.0) || (i > 0 && !(taus[i] < taus[i - 1]))) {
            throw ValidationError("jump_probe: displacements must be positive and strictly decreasing");
        }
    }
    const double tau_min = taus.back();
    std::size_t M = g.size();
    const double s = g.cap->boundary_radius();
    while (10.0 * 2.0 * kPi * s / static_cast<double>(M) > tau_min) {
        M *= 2;
        if (M > kMaxUpsampled) throw ValidationError("jump_probe: displacement below the resolution floor");
    }
    const std::size_t ratio = M / g.size();
    auto fine = std::make_shared<const QuadratureGrid>(build_boundary_grid(*g.cap, M));
    const DensitySamples qf{fine, M == g.size() ? q.values : upsample(q.values, M), false};

    const BoundaryPoint& frame = fine->frames[node * ratio];
    const Vec3& xi = frame.position.vec();
    const Vec3& nu = frame.normal;
    auto potential = [&](const Vec3& p) { return layer == LayerKind::single ? single_layer(qf, p) : double_layer(qf, p); };
    // Point at signed geodesic distance θ along the normal great circle.
    auto at = [&](double theta) { return std::cos(theta) * xi + std::sin(theta) * nu; };
    auto probe = [&](double theta, double tau) {
        if (quantity == JumpQuantity::value) return potential(at(theta));
        const double h = tau / 8.0;
        return (potential(at(theta + h)) - potential(at(theta - h))) / (2.0 * h);
    };

    JumpReport r;
    r.taus = taus;
    r.upsampled_m = M;
    for (double tau : taus) {
        const double theta = std::atan(tau);
        r.exterior.push_back(probe(theta, tau));
        r.interior.push_back(probe(-theta, tau));
        r.jumps.push_back(r.exterior.back() - r.interior.back());
    }
    const std::size_t n = taus.size();
    const double* t = &r.taus[n - 3];
    r.interior_limit = extrapolate_to_zero(t, &r.interior[n - 3]);
    r.exterior_limit = extrapolate_to_zero(t, &r.exterior[n - 3]);
    r.jump_limit = extrapolate_to_zero(t, &r.jumps[n - 3]);
    const double d1 = std::abs(r.jumps[n - 3] - r.jump_limit), d2 = std::abs(r.jumps[n - 1] - r.jump_limit);
    r.observed_order = (d1 > 0.0 && d2 > 0.0) ? std::log(d1 / d2) / std::log(t[0] / t[2]) : 0.0;
    return r;
}

double IdpSolution::operator()(const Vec3& xi) const {
    if (!density.grid->cap->contains(xi)) throw ValidationError("IdpSolution: point outside the cap");
    return double_layer(density, xi);
}

double InpSolution::operator()(const Vec3& xi) const {
    if (!density.grid->cap->contains(xi)) throw ValidationError("InpSolution: point outside the cap");
    return single_layer(density, xi);
}

IdpSolution solve_idp(const QuadratureGrid& boundary_grid, const ScalarSamples& F, NystromPath path) {
    require_boundary(boundary_grid, F.size(), "solve_idp");
    auto grid = std::make_shared<const QuadratureGrid>(boundary_grid);
    const std::size_t m = boundary_grid.size();
    std::vector<double> Q(m);
    if (path == NystromPath::closed_form) {
        // (I/2 + κ 1 wᵀ) Q = F with the constant kernel κ of a cap boundary.
        const double kappa = double_layer_diagonal(*boundary_grid.cap);
        const double wsum = pairwise_sum(boundary_grid.weights);
        const double denom = 1.0 + 2.0 * kappa * wsum;
        if (std::abs(denom) < 1e-14) throw NumericalError("solve_idp: singular Nyström system");
        const double c = 2.0 * kappa * integrate(boundary_grid, F) / denom;
        for (std::size_t i = 0; i < m; ++i) Q[i] = 2.0 * (F.values[i] - c);
    } else {
        const std::vector<double> K = double_layer_kernel_matrix(boundary_grid);
        const auto n = static_cast<Eigen::Index>(m);
        Eigen::MatrixXd A(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                A(i, j) = K[static_cast<std::size_t>(i * n + j)] * boundary_grid.weights[static_cast<std::size_t>(j)];
            }
            A(i, i) += 0.5;
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        if (lu.rcond() < 1e-14) throw NumericalError("solve_idp: singular Nyström system");
        const Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(F.values.data(), n));
        for (std::size_t i = 0; i < m; ++i) Q[i] = x(static_cast<Eigen::Index>(i));
    }
    IdpSolution sol{DensitySamples{grid, std::move(Q), false}, 0.0};
    const std::vector<double> direct = double_layer_on_boundary(sol.density);
    std::vector<double> res(m);
    for (std::size_t i = 0; i < m; ++i) res[i] = F.values[i] - 0.5 * sol.density.values[i] - direct[i];
    sol.residual = max_abs(res);
    return sol;
}

InpSolution solve_inp(const QuadratureGrid& boundary_grid, const ScalarSamples& F) {
    require_boundary(boundary_grid, F.size(), "solve_inp");
    const double flux = integrate(boundary_grid, F);
    if (std::abs(flux) > 1e-8) {
        throw ValidationError("solve_inp: boundary data is not mean-free (integral " + std::to_string(flux) + ")");
    }
    auto grid = std::make_shared<const QuadratureGrid>(boundary_grid);
    const std::size_t m = boundary_grid.size();
    // First column of the circulant matrix w_j k(ξ_i, η_j) − δ_ij/2, kernel differentiated at ξ_i.
    const double diag = double_layer_diagonal(*boundary_grid.cap);
    std::vector<double> col(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double k = i == 0 ? diag
                                : normal_kernel(boundary_grid.nodes[0].vec(), boundary_grid.nodes[i].vec(),
                                                boundary_grid.frames[i].normal);
        col[i] = boundary_grid.weights[0] * k - (i == 0 ? 0.5 : 0.0);
    }
    const Spectrum lambda = forward(col);
    Spectrum X = forward(F.values);
    X[0] = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        if (std::abs(lambda[k]) < 1e-14) throw NumericalError("solve_inp: singular circulant mode");
        X[k] /= lambda[k];
    }
    InpSolution sol{make_density(grid, inverse_real(X), true), 0.0};
    const std::vector<double> direct = single_layer_normal_on_boundary(sol.density);
    std::vector<double> res(m);
    for (std::size_t i = 0; i < m; ++i) res[i] = F.values[i] - direct[i] + 0.5 * sol.density.values[i];
    sol.residual = max_abs(res);
    return sol;
}

}  // namespace sphaerica
