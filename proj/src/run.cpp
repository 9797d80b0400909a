#include "sphaerica/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "sphaerica/apps.hpp"
#include "sphaerica/decomposition.hpp"
#include "sphaerica/errors.hpp"
#include "sphaerica/harmonics.hpp"
#include "sphaerica/kernels.hpp"
#include "sphaerica/layers.hpp"
#include "sphaerica/mfs.hpp"
#include "sphaerica/solvers.hpp"

namespace sphaerica {

namespace {

namespace fs = std::filesystem;

// Collects output files and the key/value report of one run.
class Output {
public:
    Output(const RunConfig& c, std::ostream& log) : dir_(c.out), command_(c.command), log_(log) {
        fs::create_directories(dir_);
        report_ << "command: " << command_ << '\n';
    }

    void value(const std::string& key, double v) { report_ << key << ": " << format_number(v) << '\n'; }
    void value(const std::string& key, std::size_t v) { report_ << key << ": " << v << '\n'; }
    void value(const std::string& key, int v) { report_ << key << ": " << v << '\n'; }
    void text(const std::string& key, const std::string& v) { report_ << key << ": " << v << '\n'; }
    void line(const std::string& s) { report_ << s << '\n'; }

    void csv(const std::string& name, const FieldTable& t) {
        const std::string file = command_ + "_" + name + ".csv";
        save_field_csv((dir_ / file).string(), t);
        report_ << "file: " << file << '\n';
        log_ << "wrote " << (dir_ / file).string() << '\n';
    }

    void finish() {
        const fs::path path = dir_ / (command_ + "_report.txt");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + path.string());
        out << report_.str();
        if (!out) throw Error("write failed for " + path.string());
        log_ << "wrote " << path.string() << '\n';
    }

private:
    fs::path dir_;
    std::string command_;
    std::ostream& log_;
    std::ostringstream report_;
};

struct CapDefaults {
    double lon = 10.0, lat = 70.0, radius = 0.5;
};

SphericalCap resolve_cap(const RunConfig& c, CapDefaults d, Output& out) {
    const double lon = c.cap_lon.value_or(d.lon), lat = c.cap_lat.value_or(d.lat);
    const double radius = c.cap_radius.value_or(d.radius);
    if (!(lat >= -90.0 && lat <= 90.0)) throw ValidationError("cap-center-lat must lie in [-90, 90]");
    const SphericalCap cap(UnitVector::from_lonlat_deg(lon, lat), radius);
    out.value("cap_center_lon_deg", lon);
    out.value("cap_center_lat_deg", lat);
    out.value("cap_radius", radius);
    return cap;
}

std::pair<std::size_t, std::size_t> resolve_grid(const RunConfig& c, std::size_t n_t, std::size_t n_phi, Output& out) {
    const std::size_t a = c.n_t.value_or(n_t), b = c.n_phi.value_or(n_phi);
    if (a < 2 || b < 4) throw ValidationError("grid needs nt >= 2 and nphi >= 4");
    out.value("n_t", a);
    out.value("n_phi", b);
    return {a, b};
}

std::size_t resolve_m(const RunConfig& c, std::size_t m, Output& out) {
    const std::size_t v = c.m.value_or(m);
    out.value("m", v);
    return v;
}

int resolve_J(const RunConfig& c, int J, Output& out) {
    const int v = c.J.value_or(J);
    if (v < 0 || v > 40) throw ValidationError("J must lie in [0, 40]");
    out.value("J", v);
    return v;
}

std::pair<int, int> resolve_degrees(const RunConfig& c, int lo, int hi, Output& out) {
    const int a = c.n_min.value_or(lo), b = c.n_max.value_or(hi);
    if (a < 0 || b < a || b > kMaxShDegree) throw ValidationError("degree range must satisfy 0 <= nmin <= nmax <= 128");
    out.value("n_min", a);
    out.value("n_max", b);
    return {a, b};
}

// Interior probe nodes on a concentric cap, away from the boundary.
std::vector<UnitVector> probes_for(const SphericalCap& cap) { return build_cap_grid(cap.shrunk(0.8), 12, 24).nodes; }

// Seeded combination of inner harmonics of the cap, harmonic everywhere inside it.
struct HarmonicOracle {
    std::vector<InnerHarmonicIndex> terms;
    std::vector<double> coefficients;

    double value(const Vec3& x) const {
        double s = 0.0;
        for (std::size_t i = 0; i < terms.size(); ++i) s += coefficients[i] * inner_harmonic_eval(terms[i], x);
        return s;
    }
    Vec3 grad(const Vec3& x) const {
        Vec3 s{};
        for (std::size_t i = 0; i < terms.size(); ++i) s = s + coefficients[i] * inner_harmonic_grad(terms[i], x);
        return s;
    }
};

HarmonicOracle harmonic_oracle(const SphericalCap& cap, std::uint64_t seed, int n_min, int n_max) {
    std::mt19937_64 rng(seed);
    HarmonicOracle h;
    for (int n = n_min; n <= n_max; ++n) {
        for (int k = 1; k <= (n == 0 ? 1 : 2); ++k) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            h.terms.push_back({cap, n, k});
            h.coefficients.push_back((2.0 * u - 1.0) / (n + 1.0));
        }
    }
    return h;
}

struct ErrorStats {
    double sup = 0.0, rel_max = 0.0, rel_l2 = 0.0;
};

ErrorStats compare(const std::vector<double>& values, const std::vector<double>& oracle) {
    double sup = 0.0, ref = 0.0, l2 = 0.0, l2_ref = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double e = values[i] - oracle[i];
        sup = std::max(sup, std::abs(e));
        ref = std::max(ref, std::abs(oracle[i]));
        l2 += e * e;
        l2_ref += oracle[i] * oracle[i];
    }
    return {sup, ref > 0.0 ? sup / ref : sup, l2_ref > 0.0 ? std::sqrt(l2 / l2_ref) : std::sqrt(l2)};
}

// Writes the solution grid and, when an oracle is known, the error grid and its statistics.
void emit_probe_result(Output& out, const std::string& name, const std::vector<UnitVector>& probes,
                       const std::vector<double>& values, const std::vector<double>* oracle) {
    out.value("probes", probes.size());
    out.csv(name, make_table(probes, values));
    if (!oracle) {
        out.text("oracle", "none");
        return;
    }
    std::vector<double> err(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) err[i] = values[i] - (*oracle)[i];
    out.csv("error", make_table(probes, err));
    const ErrorStats s = compare(values, *oracle);
    out.value("sup_error", s.sup);
    out.value("rel_max_error", s.rel_max);
    out.value("rel_l2_error", s.rel_l2);
}

std::optional<FieldTable> read_input(const RunConfig& c, const std::vector<UnitVector>& nodes, CsvSchema schema,
                                     const std::string& what, Output& out) {
    if (c.in.empty()) return std::nullopt;
    FieldTable t = load_field_csv(c.in);
    if (t.schema != schema) {
        throw ValidationError(c.in + ": expected a " + std::string(schema == CsvSchema::scalar ? "scalar" : "vector") +
                              " file");
    }
    require_nodes(t, nodes, c.in + " (" + what + ")");
    out.text("input", c.in);
    return t;
}

void no_input(const RunConfig& c) {
    if (!c.in.empty()) throw ValidationError(c.command + " does not read an input file");
}

ScalarSamples boundary_values(const QuadratureGrid& line, const HarmonicOracle& h, bool normal) {
    ScalarSamples s;
    s.values.resize(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
        const Vec3& x = line.nodes[i].vec();
        s.values[i] = normal ? dot(h.grad(x), line.frames[i].normal) : h.value(x);
    }
    return s;
}

std::vector<double> oracle_at(const std::vector<UnitVector>& probes, const HarmonicOracle& h) {
    return evaluate_points(probes, [&](const UnitVector& p) { return h.value(p.vec()); });
}

// Boundary-value commands share their setup.
struct BoundaryProblem {
    SphericalCap cap{UnitVector(), 1.0};
    std::shared_ptr<const QuadratureGrid> line;
    std::vector<UnitVector> probes;
    ScalarSamples data;
    std::optional<std::vector<double>> oracle;
    HarmonicOracle harmonic;
};

BoundaryProblem boundary_problem(const RunConfig& c, Output& out, bool normal, std::size_t default_m) {
    BoundaryProblem p;
    p.cap = resolve_cap(c, {}, out);
    p.line = std::make_shared<const QuadratureGrid>(build_boundary_grid(p.cap, resolve_m(c, default_m, out)));
    p.probes = probes_for(p.cap);
    if (auto t = read_input(c, p.line->nodes, CsvSchema::scalar, "boundary nodes", out)) {
        p.data = t->scalar_samples();
        return p;
    }
    const auto [lo, hi] = resolve_degrees(c, 0, 4, out);
    out.value("seed", static_cast<std::size_t>(c.seed));
    p.harmonic = harmonic_oracle(p.cap, c.seed, lo, hi);
    p.data = boundary_values(*p.line, p.harmonic, normal);
    p.oracle = oracle_at(p.probes, p.harmonic);
    return p;
}

void cmd_poisson(const RunConfig& c, Output& out) {
    no_input(c);
    const SphericalCap cap = resolve_cap(c, {}, out);
    const auto [n_t, n_phi] = resolve_grid(c, 48, 96, out);
    const QuadratureGrid grid = build_cap_grid(cap, n_t, n_phi);
    const int J = resolve_J(c, default_scale(grid), out);
    const auto [lo, hi] = resolve_degrees(c, 1, 6, out);
    out.value("seed", static_cast<std::size_t>(c.seed));
    const ShCoefficients H = synth_field(c.seed, lo, hi);
    const ScalarSamples h = sample(grid, [&](const UnitVector& e) { return sh_eval(H, e.vec()); });
    const Vec3 xi_bar = -cap.center().vec();
    const auto probes = probes_for(cap);
    const ScalarField U = [&](const Vec3& x) { return poisson_solve_cap(grid, h, xi_bar, x, J); };
    const auto values = evaluate_points(probes, [&](const UnitVector& p) { return U(p.vec()); });
    out.value("probes", probes.size());
    out.csv("U", make_table(probes, values));
    // Δ*U − H at every 32nd probe by finite differences.
    double residual = 0.0;
    for (std::size_t i = 0; i < probes.size(); i += 32) {
        residual = std::max(residual, std::abs(beltrami_fd(U, probes[i].vec(), 1e-2) - sh_eval(H, probes[i].vec())));
    }
    out.value("max_interior_residual", residual);
}

void cmd_dirichlet(const RunConfig& c, Output& out) {
    const BoundaryProblem p = boundary_problem(c, out, false, 512);
    const auto values = evaluate_points(p.probes, [&](const UnitVector& e) {
        return dirichlet_solve_cap(*p.line, p.data, e.vec());
    });
    emit_probe_result(out, "U", p.probes, values, p.oracle ? &*p.oracle : nullptr);
}

void cmd_neumann(const RunConfig& c, Output& out) {
    const BoundaryProblem p = boundary_problem(c, out, true, 512);
    double mean = 0.0;
    if (p.oracle) {
        const QuadratureGrid area = build_cap_grid(p.cap, 48, 96);
        mean = cap_mean(area, sample(area, [&](const UnitVector& e) { return p.harmonic.value(e.vec()); }));
    }
    out.value("mean_value", mean);
    const auto values = evaluate_points(p.probes, [&](const UnitVector& e) {
        return neumann_solve_cap(*p.line, p.data, mean, e.vec());
    });
    emit_probe_result(out, "U", p.probes, values, p.oracle ? &*p.oracle : nullptr);
}

void cmd_idp(const RunConfig& c, Output& out) {
    const BoundaryProblem p = boundary_problem(c, out, false, 512);
    const IdpSolution s = solve_idp(*p.line, p.data);
    out.value("density_residual", s.residual);
    out.csv("density", make_table(p.line->nodes, s.density.values));
    const auto values = evaluate_points(p.probes, [&](const UnitVector& e) { return s(e.vec()); });
    emit_probe_result(out, "U", p.probes, values, p.oracle ? &*p.oracle : nullptr);
}

void cmd_inp(const RunConfig& c, Output& out) {
    const BoundaryProblem p = boundary_problem(c, out, true, 512);
    const InpSolution s = solve_inp(*p.line, p.data);
    out.value("density_residual", s.residual);
    out.csv("density", make_table(p.line->nodes, s.density.values));
    auto values = evaluate_points(p.probes, [&](const UnitVector& e) { return s(e.vec()); });
    if (p.oracle) {
        // The solution is unique up to a constant; align the probe means.
        double shift = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) shift += (*p.oracle)[i] - values[i];
        shift /= static_cast<double>(values.size());
        for (double& v : values) v += shift;
        out.value("constant_shift", shift);
    }
    emit_probe_result(out, "U", p.probes, values, p.oracle ? &*p.oracle : nullptr);
}

void cmd_jump_test(const RunConfig& c, Output& out) {
    const SphericalCap cap = resolve_cap(c, {}, out);
    auto line = std::make_shared<const QuadratureGrid>(build_boundary_grid(cap, resolve_m(c, 1024, out)));
    std::vector<double> q(line->size());
    if (auto t = read_input(c, line->nodes, CsvSchema::scalar, "boundary nodes", out)) {
        q = t->values;
    } else {
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double phi = line->frames[j].phi;
            q[j] = 0.3 + std::cos(2.0 * phi) + 0.5 * std::sin(3.0 * phi);
        }
    }
    const DensitySamples density = make_density(line, q);
    out.csv("density", make_table(line->nodes, q));
    std::vector<double> taus;
    for (int k = 4; k <= 9; ++k) taus.push_back(std::ldexp(1.0, -k));
    const std::size_t m = line->size();
    const std::vector<std::size_t> nodes = {0, m / 3, (2 * m) / 3};
    struct Probe {
        const char* name;
        LayerKind layer;
        JumpQuantity quantity;
        double sign;  // expected jump = sign·Q; 0 means no jump
    };
    const Probe probes[] = {{"double_value", LayerKind::double_, JumpQuantity::value, -1.0},
                            {"single_value", LayerKind::single, JumpQuantity::value, 0.0},
                            {"single_normal", LayerKind::single, JumpQuantity::normal_derivative, 1.0}};
    std::vector<UnitVector> at;
    for (std::size_t n : nodes) at.push_back(line->nodes[n]);
    for (const Probe& pr : probes) {
        std::vector<double> jumps;
        double worst = 0.0;
        for (std::size_t n : nodes) {
            const JumpReport r = jump_probe(pr.layer, pr.quantity, density, n, taus);
            jumps.push_back(r.jump_limit);
            const double expected = pr.sign * q[n];
            const double err = std::abs(r.jump_limit - expected);
            worst = std::max(worst, pr.sign == 0.0 ? err : err / std::abs(q[n]));
        }
        out.csv(pr.name, make_table(at, jumps));
        out.value(std::string(pr.name) + (pr.sign == 0.0 ? "_abs_error" : "_rel_error"), worst);
    }
}

void cmd_helmholtz(const RunConfig& c, Output& out) {
    const SphericalCap cap = resolve_cap(c, {}, out);
    const auto [n_t, n_phi] = resolve_grid(c, 64, 128, out);
    const QuadratureGrid area = build_cap_grid(cap, n_t, n_phi);
    const QuadratureGrid line = build_boundary_grid(cap, resolve_m(c, 512, out));
    const int J = resolve_J(c, 10, out);
    const auto probes = probes_for(cap);
    VectorSamples f;
    std::optional<ScalarSamples> trace;
    std::optional<ShCoefficients> P, S;
    if (auto t = read_input(c, area.nodes, CsvSchema::vector, "cap grid nodes", out)) {
        f = t->vector_samples();
    } else {
        const auto [lo, hi] = resolve_degrees(c, 1, 4, out);
        out.value("seed", static_cast<std::size_t>(c.seed));
        P = synth_field(c.seed, lo, hi, 1.0);
        S = synth_field(c.seed + 1, lo, hi, 1.0);
        f = sample_vector(area, [&](const UnitVector& e) { return sh_grad_eval(*P, e.vec()) + sh_curl_eval(*S, e.vec()); },
                          true);
        trace = sample(line, [&](const UnitVector& e) { return sh_eval(*S, e.vec()); });
        out.csv("field", make_table(area.nodes, f.values));
    }
    const HelmholtzScalars s = helmholtz_decompose_cap(area, f, line, trace, J, probes);
    out.value("probes", probes.size());
    out.csv("F2", make_table(probes, s.F2));
    out.csv("F3", make_table(probes, s.F3));
    if (!P) {
        out.text("oracle", "none");
        return;
    }
    const double meanP = cap_mean(area, sample(area, [&](const UnitVector& e) { return sh_eval(*P, e.vec()); }));
    std::vector<double> o2, o3;
    for (const auto& p : probes) {
        o2.push_back(sh_eval(*P, p.vec()) - meanP);
        o3.push_back(sh_eval(*S, p.vec()));
    }
    out.value("F2_sup_error", compare(s.F2, o2).sup);
    out.value("F3_sup_error", compare(s.F3, o3).sup);
}

void cmd_hardy_hodge(const RunConfig& c, Output& out) {
    no_input(c);
    const auto [n_t, n_phi] = resolve_grid(c, 64, 128, out);
    const QuadratureGrid g = build_sphere_grid(n_t, n_phi);
    const int J = resolve_J(c, 12, out);
    const auto [lo, hi] = resolve_degrees(c, 1, 4, out);
    if (lo < 1) throw ValidationError("hardy-hodge needs nmin >= 1");
    out.value("seed", static_cast<std::size_t>(c.seed));
    const HardyHodgeCoefficients hh{synth_field(c.seed, lo, hi, 1.0), synth_field(c.seed + 1, lo, hi, 1.0),
                                    synth_field(c.seed + 2, lo, hi, 1.0)};
    const VectorSamples f = sample_vector(g, [&](const UnitVector& e) { return hardy_hodge_compose(hh, e.vec()); }, false);
    const int max_degree = std::max(hi + 4, 12);
    out.value("max_degree", max_degree);
    const HardyHodgeScalars s = hardy_hodge_decompose_sphere(g, f, J, DInversePath::spectral, max_degree);
    const std::vector<double>* parts[] = {&s.F1, &s.F2, &s.F3};
    const ShCoefficients* exact[] = {&hh.F1, &hh.F2, &hh.F3};
    const char* names[] = {"F1", "F2", "F3"};
    for (int k = 0; k < 3; ++k) {
        out.csv(names[k], make_table(g.nodes, *parts[k]));
        std::vector<double> o(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) o[i] = sh_eval(*exact[k], g.nodes[i].vec());
        out.value(std::string(names[k]) + "_sup_error", compare(*parts[k], o).sup);
    }
}

// Shared driver of the two gradient-inversion applications.
void run_inversion(const RunConfig& c, Output& out, bool geostrophic) {
    const SphericalCap cap =
        geostrophic ? resolve_cap(c, {200.0, 50.0, 0.2}, out) : resolve_cap(c, {20.0, 45.0, 0.5}, out);
    const auto [n_t, n_phi] = resolve_grid(c, 120, 240, out);
    const QuadratureGrid grid = build_cap_grid(cap, n_t, n_phi);
    const int J = resolve_J(c, 15, out);
    const PhysicalConstants k{c.R, c.GM, c.omega, c.G};
    k.validate();
    out.value("R", k.R);
    out.value(geostrophic ? "omega" : "GM", geostrophic ? k.omega : k.GM);
    if (geostrophic) out.value("G", k.G);
    const auto probes = probes_for(cap);
    const char* field = geostrophic ? "velocity" : "theta";
    const char* result = geostrophic ? "H" : "T";

    VectorSamples samples;
    double mean = 0.0;
    std::optional<ShCoefficients> truth;
    if (auto t = read_input(c, grid.nodes, CsvSchema::vector, "cap grid nodes", out)) {
        samples = t->vector_samples();
        samples.tangential = true;
        require_tangential(grid, samples, 1e-8);
    } else {
        const auto [lo, hi] = resolve_degrees(c, 3, 25, out);
        out.value("seed", static_cast<std::size_t>(c.seed));
        truth = synth_field(c.seed, lo, hi);
        const ForwardSamples fw = geostrophic ? geo_forward(*truth, grid, k) : vd_forward(*truth, grid, k);
        samples = fw.field;
        mean = cap_mean(grid, fw.potential);
        out.csv(field, make_table(grid.nodes, samples.values));
    }
    out.value("mean_value", mean);
    const AppReport r = geostrophic ? geo_reconstruct(grid, samples, J, mean, probes, k)
                                    : vd_reconstruct(grid, samples, J, mean, probes, k);
    std::vector<double> oracle;
    if (truth) oracle = evaluate_points(probes, [&](const UnitVector& p) { return sh_eval(*truth, p.vec()); });
    emit_probe_result(out, result, probes, r.values, truth ? &oracle : nullptr);
}

void cmd_vortex(const RunConfig& c, Output& out) {
    no_input(c);
    const SphericalCap cap = resolve_cap(c, {0.0, 90.0, 0.9}, out);
    const double rho_bar = c.rho_bar.value_or(cap.radius() + 0.005);
    const std::size_t nc = resolve_m(c, c.M, out);
    out.value("N", c.N);
    out.value("M", c.M);
    out.value("rho_bar", rho_bar);
    out.value("lambda", c.lambda);
    out.value("R", c.R);
    out.value("seed", static_cast<std::size_t>(c.seed));
    const VortexSet v = random_vortices(cap, c.N, c.seed);
    out.csv("vortices", make_table(v.centers, v.strengths));
    const auto probes = probes_for(cap);
    const AppReport r = vortex_mfs(cap, v, c.M, rho_bar, c.lambda, probes, c.R, nc);
    out.value("condition", r.condition);
    out.value("boundary_residual", r.boundary_residual);
    out.value("probes", probes.size());
    out.csv("psi", make_table(probes, r.values));
    std::vector<double> err(r.values.size());
    for (std::size_t i = 0; i < err.size(); ++i) err[i] = r.values[i] - r.oracle[i];
    out.csv("error", make_table(probes, err));
    out.value("sup_error", r.sup_error);
    out.value("rel_max_error", r.rel_max_error);
    out.value("rel_l2_error", r.rel_l2_error);
}

void cmd_mfs_fit(const RunConfig& c, Output& out) {
    const SphericalCap cap = resolve_cap(c, {}, out);
    const double rho_bar = c.rho_bar.value_or(std::min(1.5 * cap.radius(), 0.5 * (cap.radius() + 2.0)));
    const std::size_t nc = resolve_m(c, 2 * c.M, out);
    out.value("M", c.M);
    out.value("rho_bar", rho_bar);
    out.value("lambda", c.lambda);
    const QuadratureGrid line = build_boundary_grid(cap, nc);
    const auto probes = probes_for(cap);
    ScalarSamples data;
    std::optional<std::vector<double>> oracle;
    if (auto t = read_input(c, line.nodes, CsvSchema::scalar, "boundary nodes", out)) {
        data = t->scalar_samples();
    } else {
        const auto [lo, hi] = resolve_degrees(c, 0, 4, out);
        out.value("seed", static_cast<std::size_t>(c.seed));
        const HarmonicOracle h = harmonic_oracle(cap, c.seed, lo, hi);
        data = boundary_values(line, h, false);
        oracle = oracle_at(probes, h);
    }
    const FundamentalSystem system =
        make_fundamental_system(BasisVariant::gk_mod, cap, c.M, rho_bar, UnitVector(-cap.center().vec()));
    const MfsSolution fit = mfs_fit(system, line, data, {FitKind::tikhonov, c.lambda});
    out.value("condition", fit.condition);
    out.value("boundary_residual", fit.boundary_residual);
    const auto values = evaluate_points(probes, [&](const UnitVector& p) { return mfs_eval(fit, p.vec()); });
    emit_probe_result(out, "U", probes, values, oracle ? &*oracle : nullptr);
}

// Fast invariants; each line of the report reads "PASS|FAIL name value tolerance".
void cmd_selfcheck(const RunConfig& c, Output& out) {
    no_input(c);
    bool ok = true;
    const auto check = [&](const std::string& name, double value, double tol) {
        const bool pass = std::isfinite(value) && value <= tol;
        ok = ok && pass;
        out.line(std::string(pass ? "PASS " : "FAIL ") + name + " " + format_number(value) + " " + format_number(tol));
    };
    const UnitVector zeta(0.1, 0.2, 0.95);
    const SphericalCap cap(zeta, 0.5);

    {
        const UnitVector pole(0.3, -0.4, 0.8);
        const QuadratureGrid g = build_sphere_grid(64, 128, pole, 3);
        const ScalarSamples s = sample(g, [&](const UnitVector& e) {
            const double t = dot(e.vec(), pole.vec());
            return 1.0 - t < kSingularityGuard ? 0.0 : fundamental(t);
        });
        check("fundamental_zero_mean", std::abs(integrate(g, s)), 1e-10);
        check("fundamental_antipode", std::abs(fundamental(-1.0) - 1.0 / (4.0 * kPi)), 1e-15);
    }
    {
        auto line = std::make_shared<const QuadratureGrid>(build_boundary_grid(SphericalCap(zeta, 0.5), 256));
        const DensitySamples one = make_density(line, std::vector<double>(256, 1.0));
        const UnitVector inside = UnitVector::from_lonlat_deg(zeta.lon_deg() + 5.0, zeta.lat_deg());
        const UnitVector outside(-zeta.vec());
        check("double_layer_interior", std::abs(double_layer(one, inside.vec()) - 0.75), 1e-10);
        check("double_layer_exterior", std::abs(double_layer(one, outside.vec()) + 0.25), 1e-10);
        check("double_layer_boundary", std::abs(double_layer_on_boundary(one)[17] - 0.25), 1e-10);
        const ScalarSamples ones{std::vector<double>(256, 1.0)};
        check("dirichlet_constant", std::abs(dirichlet_solve_cap(*line, ones, inside.vec()) - 1.0), 1e-12);
        const Vec3 src = UnitVector::from_lonlat_deg(zeta.lon_deg() - 4.0, zeta.lat_deg() + 3.0).vec();
        double flux = 0.0;
        for (const BoundaryPoint& b : line->frames) {
            flux = std::max(flux, std::abs(dot(b.normal, neumann_green_deriv(cap, src, b.position.vec(), Deriv::grad))));
        }
        check("neumann_green_boundary_flux", flux, 1e-10);
    }
    {
        const InnerHarmonicIndex h{cap, 3, 1};
        const ScalarField F = [&](const Vec3& x) { return inner_harmonic_eval(h, x); };
        const SphericalCap probe(UnitVector::from_lonlat_deg(zeta.lon_deg() + 3.0, zeta.lat_deg()), 0.2);
        check("mean_value_area", mvp_residual(F, probe, MeanValueKind::area_and_boundary), 1e-9);
        check("mean_value_boundary", mvp_residual(F, probe, MeanValueKind::boundary), 1e-9);
        check("max_principle", max_principle_check(F, cap, 24, 48, 256) ? 0.0 : 1.0, 0.0);
    }
    {
        // Planar radii 0.9 and 1.5: the error shrinks by 0.6 per degree.
        const Vec3 xi = stereographic_unproject(zeta, {0.9 * std::cos(0.4), 0.9 * std::sin(0.4)}).vec();
        const Vec3 eta = stereographic_unproject(zeta, {1.5 * std::cos(0.4), 1.5 * std::sin(0.4)}).vec();
        const double exact = std::log(1.0 - dot(xi, eta));
        double last = INFINITY, worst = 0.0;
        for (int N : {5, 10, 20}) {
            const double e = std::abs(log_series(xi, eta, zeta, 0.9, N) - exact);
            worst = std::max(worst, e >= last ? 1.0 : 0.0);
            last = e;
        }
        check("log_series_decreasing", worst, 0.0);
    }
    {
        const QuadratureGrid g = build_sphere_grid(32, 64);
        const ScalarSamples ones{std::vector<double>(g.size(), 1.0)};
        check("d_inverse_of_one", std::abs(d_inv_convolve(g, ones, g.nodes[100].vec(), 1.0) - 2.0), 1e-12);
    }
    {
        const FundamentalSystem sys =
            make_fundamental_system(BasisVariant::gk_mod, cap, 9, 0.7, UnitVector(-zeta.vec()));
        const ScalarField phi = [&](const Vec3& x) { return basis_eval(sys, 3, x); };
        check("mfs_basis_harmonic", std::abs(beltrami_fd(phi, zeta.vec())), 1e-4);
    }
    out.text("result", ok ? "pass" : "fail");
    if (!ok) throw NumericalError("selfcheck: at least one invariant failed");
}

using Handler = void (*)(const RunConfig&, Output&);

Handler find_handler(const std::string& name) {
    if (name == "selfcheck") return cmd_selfcheck;
    if (name == "poisson") return cmd_poisson;
    if (name == "dirichlet") return cmd_dirichlet;
    if (name == "neumann") return cmd_neumann;
    if (name == "idp") return cmd_idp;
    if (name == "inp") return cmd_inp;
    if (name == "jump-test") return cmd_jump_test;
    if (name == "helmholtz") return cmd_helmholtz;
    if (name == "hardy-hodge") return cmd_hardy_hodge;
    if (name == "vertical-deflections") return [](const RunConfig& c, Output& o) { run_inversion(c, o, false); };
    if (name == "geostrophic") return [](const RunConfig& c, Output& o) { run_inversion(c, o, true); };
    if (name == "vortex") return cmd_vortex;
    if (name == "mfs-fit") return cmd_mfs_fit;
    return nullptr;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
    try {
        const Handler handler = find_handler(config.command);
        if (!handler) throw ValidationError("unknown command '" + config.command + "'");
        Output out(config, log);
        try {
            handler(config, out);
        } catch (const NumericalError&) {
            out.finish();  // the report shows what failed
            throw;
        }
        out.finish();
        return kExitOk;
    } catch (const ValidationError& e) {
        log << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace sphaerica
