#include "sphaerica/apps.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sphaerica/errors.hpp"
#include "sphaerica/kernels.hpp"
#include "sphaerica/mfs.hpp"
#include "sphaerica/parallel.hpp"

namespace sphaerica {

namespace {

void require_cap_grid(const QuadratureGrid& g, std::size_t n, const char* who) {
    if (g.kind != GridKind::cap_area || !g.cap) throw ValidationError(std::string(who) + ": needs a cap grid");
    if (n != g.size()) throw ValidationError(std::string(who) + ": sample count does not match the grid");
}

void require_probes(const SphericalCap& cap, const std::vector<UnitVector>& probes, const char* who) {
    for (const auto& p : probes) {
        if (!cap.contains_strictly(p.vec())) throw ValidationError(std::string(who) + ": probe outside the cap");
    }
}

AppReport base_report(const QuadratureGrid& g, const std::vector<UnitVector>& probes, int J) {
    AppReport r;
    r.probes = probes;
    r.n_t = g.n_t;
    r.n_phi = g.n_phi;
    r.J = J;
    return r;
}

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

void PhysicalConstants::validate() const {
    if (!(R > 0 && GM > 0 && omega > 0 && G > 0) || !std::isfinite(R + GM + omega + G)) {
        throw ValidationError("physical constants must be positive and finite");
    }
}

double cap_mean(const QuadratureGrid& cap_grid, const ScalarSamples& s) {
    require_cap_grid(cap_grid, s.size(), "cap_mean");
    return integrate(cap_grid, s) / cap_grid.total_weight();
}

void attach_errors(AppReport& report, const ScalarField& oracle) {
    const std::size_t n = report.probes.size();
    report.oracle.resize(n);
    for (std::size_t i = 0; i < n; ++i) report.oracle[i] = oracle(report.probes[i].vec());
    double sup = 0.0, sup_ref = 0.0, l2 = 0.0, l2_ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = report.values[i] - report.oracle[i];
        sup = std::max(sup, std::abs(e));
        sup_ref = std::max(sup_ref, std::abs(report.oracle[i]));
        l2 += e * e;
        l2_ref += report.oracle[i] * report.oracle[i];
    }
    report.sup_error = sup;
    report.rel_max_error = sup_ref > 0.0 ? sup / sup_ref : sup;
    report.rel_l2_error = l2_ref > 0.0 ? std::sqrt(l2 / l2_ref) : std::sqrt(l2);
}

ForwardSamples vd_forward(const ShCoefficients& T, const QuadratureGrid& cap_grid, const PhysicalConstants& k) {
    require_cap_grid(cap_grid, cap_grid.size(), "vd_forward");
    k.validate();
    const std::size_t n = cap_grid.size();
    ForwardSamples out;
    out.potential.values.resize(n);
    out.field.values.resize(n);
    out.field.tangential = true;
    parallel_for(n, [&](std::size_t i) {
        const Vec3& xi = cap_grid.nodes[i].vec();
        out.potential.values[i] = sh_eval(T, xi);
        out.field.values[i] = (-k.R / k.GM) * sh_grad_eval(T, xi);
    });
    return out;
}

AppReport vd_reconstruct(const QuadratureGrid& cap_grid, const VectorSamples& theta, int J, double T_mean,
                         const std::vector<UnitVector>& probes, const PhysicalConstants& k,
                         const std::optional<ScalarField>& oracle) {
    require_cap_grid(cap_grid, theta.size(), "vd_reconstruct");
    require_probes(*cap_grid.cap, probes, "vd_reconstruct");
    k.validate();
    AppReport r = base_report(cap_grid, probes, J);
    const double scale = k.GM / k.R;
    // ∇*T = −(GM/R)Θ, and invert_gradient returns −∫∇*G_N^J·f.
    r.values = evaluate_points(probes, [&](const UnitVector& p) {
        return T_mean - scale * invert_gradient(cap_grid, theta, Deriv::grad, J, p.vec());
    });
    if (oracle) attach_errors(r, *oracle);
    return r;
}

double equator_clearance(const SphericalCap& cap) {
    const double alpha = std::acos(std::clamp(cap.center().vec().z, -1.0, 1.0));
    const double theta = std::acos(std::clamp(1.0 - cap.radius(), -1.0, 1.0));
    const double z_hi = std::cos(std::max(alpha - theta, 0.0));
    const double z_lo = std::cos(std::min(alpha + theta, kPi));
    if (z_lo <= 0.0 && z_hi >= 0.0) return 0.0;
    return std::min(std::abs(z_lo), std::abs(z_hi));
}

ForwardSamples geo_forward(const ShCoefficients& H, const QuadratureGrid& cap_grid, const PhysicalConstants& k) {
    require_cap_grid(cap_grid, cap_grid.size(), "geo_forward");
    k.validate();
    if (equator_clearance(*cap_grid.cap) < kEquatorGuard) {
        throw ValidationError("geo_forward: cap comes within |z| < 0.15 of the equator");
    }
    const std::size_t n = cap_grid.size();
    ForwardSamples out;
    out.potential.values.resize(n);
    out.field.values.resize(n);
    out.field.tangential = true;
    parallel_for(n, [&](std::size_t i) {
        const Vec3& xi = cap_grid.nodes[i].vec();
        out.potential.values[i] = sh_eval(H, xi);
        out.field.values[i] = (k.G / (2.0 * k.R * k.omega * xi.z)) * sh_curl_eval(H, xi);
    });
    return out;
}

AppReport geo_reconstruct(const QuadratureGrid& cap_grid, const VectorSamples& v, int J, double H_mean,
                          const std::vector<UnitVector>& probes, const PhysicalConstants& k,
                          const std::optional<ScalarField>& oracle) {
    require_cap_grid(cap_grid, v.size(), "geo_reconstruct");
    require_probes(*cap_grid.cap, probes, "geo_reconstruct");
    k.validate();
    if (equator_clearance(*cap_grid.cap) < kEquatorGuard) {
        throw ValidationError("geo_reconstruct: cap comes within |z| < 0.15 of the equator");
    }
    // L*H = (2R|w|/G)(ξ·ε³) v.
    VectorSamples curl;
    curl.tangential = v.tangential;
    curl.values.resize(v.size());
    const double scale = 2.0 * k.R * k.omega / k.G;
    for (std::size_t i = 0; i < v.size(); ++i) curl.values[i] = (scale * cap_grid.nodes[i].vec().z) * v.values[i];
    AppReport r = base_report(cap_grid, probes, J);
    r.values = evaluate_points(probes, [&](const UnitVector& p) {
        return H_mean + invert_gradient(cap_grid, curl, Deriv::curl, J, p.vec());
    });
    if (oracle) attach_errors(r, *oracle);
    return r;
}

void validate_vortices(const SphericalCap& cap, const VortexSet& v) {
    if (v.centers.size() != v.strengths.size()) throw ValidationError("vortices: centre and strength counts differ");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!cap.contains_strictly(v.centers[i].vec())) throw ValidationError("vortices: centre outside the cap");
        if (!std::isfinite(v.strengths[i])) throw ValidationError("vortices: non-finite strength");
        for (std::size_t j = 0; j < i; ++j) {
            if (1.0 - dot(v.centers[i].vec(), v.centers[j].vec()) < kSingularityGuard) {
                throw ValidationError("vortices: coincident centres");
            }
        }
    }
    if (cap.gap(v.xi_bar.vec()) <= cap.radius()) throw ValidationError("vortices: regularization point inside the cap");
}

VortexSet random_vortices(const SphericalCap& cap, std::size_t N, std::uint64_t seed, double spread) {
    if (!(spread > 0.0 && spread < 1.0)) throw ValidationError("random_vortices: spread must lie in (0, 1)");
    std::mt19937_64 gen(seed);
    const RotationFrame frame = rotation_to_pole(cap.center());
    VortexSet v;
    v.xi_bar = UnitVector(-cap.center().vec());
    for (std::size_t i = 0; i < N; ++i) {
        // Area on the sphere is uniform in the polar gap.
        const double t = 1.0 - spread * cap.radius() * uniform01(gen);
        const double phi = 2.0 * kPi * uniform01(gen);
        const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
        v.centers.emplace_back(frame.apply({s * std::cos(phi), s * std::sin(phi), t}));
        v.strengths.push_back(2.0 * uniform01(gen) - 1.0);
    }
    validate_vortices(cap, v);
    return v;
}

double vortex_exact(const SphericalCap& cap, const VortexSet& v, const Vec3& xi, double R) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) sum += v.strengths[i] / R * dirichlet_green(cap, v.centers[i].vec(), xi);
    return sum;
}

double vortex_free_part(const VortexSet& v, const Vec3& xi, double R) {
    const double bar = std::log(1.0 - dot(xi, v.xi_bar.vec())) / (4.0 * kPi);
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double t = dot(xi, v.centers[i].vec());
        if (1.0 - t < kSingularityGuard) throw SingularityError("vortex stream function evaluated at a vortex centre");
        sum += v.strengths[i] / R * (fundamental(t) - bar);
    }
    return sum;
}

AppReport vortex_mfs(const SphericalCap& cap, const VortexSet& v, std::size_t M, double rho_bar, double lambda,
                     const std::vector<UnitVector>& probes, double R, std::size_t collocation) {
    validate_vortices(cap, v);
    require_probes(cap, probes, "vortex_mfs");
    if (M < 2) throw ValidationError("vortex_mfs: need at least two collocation points");
    if (!(R > 0.0)) throw ValidationError("vortex_mfs: R must be positive");
    const std::size_t nc = collocation == 0 ? M : collocation;
    if (nc < M) throw ValidationError("vortex_mfs: fewer collocation nodes than basis functions");
    const QuadratureGrid boundary = build_boundary_grid(cap, nc);
    ScalarSamples data;
    data.values.resize(nc);
    for (std::size_t i = 0; i < nc; ++i) data.values[i] = vortex_free_part(v, boundary.nodes[i].vec(), R);
    const FundamentalSystem system = make_fundamental_system(BasisVariant::gk_mod, cap, M, rho_bar, v.xi_bar);
    const MfsSolution fit = mfs_fit(system, boundary, data, {FitKind::tikhonov, lambda});

    AppReport r;
    r.probes = probes;
    r.m = nc;
    r.M = M;
    r.rho_bar = rho_bar;
    r.lambda = lambda;
    r.condition = fit.condition;
    r.boundary_residual = fit.boundary_residual;
    r.values = evaluate_points(probes, [&](const UnitVector& p) {
        return vortex_free_part(v, p.vec(), R) - mfs_eval(fit, p.vec());
    });
    attach_errors(r, [&](const Vec3& xi) { return vortex_exact(cap, v, xi, R); });
    return r;
}

}  // namespace sphaerica
