#include "orblab/experiments.hpp"

#include "orblab/birkhoff.hpp"
#include "orblab/charts.hpp"
#include "orblab/csv.hpp"
#include "orblab/diophantine.hpp"
#include "orblab/dynamics.hpp"
#include "orblab/rng.hpp"
#include "orblab/secular.hpp"
#include "orblab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <thread>

namespace orblab {

namespace {

// ---------------------------------------------------------------- summary

class Summary {
public:
    Summary(std::ostream& log, const std::string& path) : log_(log), csv_(path) {
        csv_.header({"assertion", "value", "tolerance", "status"});
    }

    void check(const std::string& name, Scalar value, Scalar tol, bool pass) {
        log_ << (pass ? "[PASS] " : "[FAIL] ") << name << "  value=" << CsvWriter::num(value)
             << "  tol=" << CsvWriter::num(tol) << "\n";
        csv_.row({name, CsvWriter::num(value), CsvWriter::num(tol), pass ? "pass" : "fail"});
        all_ &= pass;
    }
    void check_below(const std::string& name, Scalar value, Scalar tol) {
        check(name, value, tol, value < tol);
    }
    void check_above(const std::string& name, Scalar value, Scalar floor) {
        check(name, value, floor, value > floor);
    }
    void info(const std::string& name, Scalar value) {
        log_ << "[INFO] " << name << "  value=" << CsvWriter::num(value) << "\n";
        csv_.row({name, CsvWriter::num(value), "", "report"});
    }
    bool all_passed() const { return all_; }

private:
    std::ostream& log_;
    CsvWriter csv_;
    bool all_ = true;
};

// ------------------------------------------------------------ parallel map

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < count; i += jobs) fn(i);
        });
    for (std::thread& t : pool) t.join();
}

// -------------------------------------------------------- system builders

Mat3 rot_x(Scalar t) {
    Mat3 R;
    R << 1, 0, 0, 0, std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t);
    return R;
}

SystemMasses masses_from(const Config& cfg) {
    const int n = static_cast<int>(cfg.integer("system", "n"));
    std::vector<Scalar> m = cfg.list_or("system", "masses", std::vector<Scalar>(n, 1.0));
    if (static_cast<int>(m.size()) != n)
        throw config_error("system.masses must list one factor per planet", 0);
    return SystemMasses(cfg.scalar_or("system", "m0", 1.0), cfg.scalar_or("system", "mu", 1e-3),
                        std::move(m));
}

/// Explicit system from per-body element lists with deterministic angle
/// defaults and an overall tilt of the reference plane.
CartesianState system_from(const Config& cfg, const SystemMasses& ms) {
    const int n = ms.count();
    const std::vector<Scalar> a = cfg.list("system", "a");
    if (static_cast<int>(a.size()) != n) throw config_error("system.a must list n values", 0);
    std::vector<Scalar> defaults(n);
    for (int i = 0; i < n; ++i) defaults[i] = 0.3 + 0.15 * i;
    const std::vector<Scalar> e = cfg.list_or("system", "e", defaults);
    for (int i = 0; i < n; ++i) defaults[i] = 0.25 + 0.12 * std::cos(1.0 + i);
    const std::vector<Scalar> incl = cfg.list_or("system", "inclination", defaults);
    for (int i = 0; i < n; ++i) defaults[i] = wrap_angle(2.39996 * i);
    const std::vector<Scalar> node = cfg.list_or("system", "node", defaults);
    for (int i = 0; i < n; ++i) defaults[i] = wrap_angle(0.4 + 1.7 * i);
    const std::vector<Scalar> argp = cfg.list_or("system", "arg_perihelion", defaults);
    for (int i = 0; i < n; ++i) defaults[i] = wrap_angle(0.2 + 2.1 * i);
    const std::vector<Scalar> anom = cfg.list_or("system", "anomaly", defaults);
    const Scalar tilt = cfg.scalar_or("system", "tilt", 0.0);

    std::vector<EllipseElements> els(n);
    for (int i = 0; i < n; ++i) {
        EllipseElements el;
        el.a = a[i];
        el.e = e[i];
        const Scalar si = std::sin(incl[i]), ci = std::cos(incl[i]);
        el.normal = Vec3(si * std::sin(node[i]), -si * std::cos(node[i]), ci);
        const Vec3 nvec(std::cos(node[i]), std::sin(node[i]), 0.0);
        el.perihelion = rotate_about(el.normal, nvec, argp[i]);
        el.ell = anom[i];
        const Mat3 R = rot_x(tilt);
        el.normal = R * el.normal;
        el.perihelion = R * el.perihelion;
        els[i] = el;
    }
    return state_from_elements(els, ms);
}

/// Random spatial system inside every chart domain: moderate e and
/// inclinations, total angular momentum tilted away from the pole.
CartesianState sample_state(SplitMix64& rng, const SystemMasses& ms, Scalar e_lo = 0.15,
                            Scalar e_hi = 0.5, Scalar incl_max = 0.35) {
    const int n = ms.count();
    std::vector<EllipseElements> els(n);
    Scalar a = rng.uniform(0.8, 1.2);
    for (int i = 0; i < n; ++i) {
        EllipseElements el;
        el.a = a;
        a /= rng.uniform(0.1, 0.3);
        el.e = rng.uniform(e_lo, e_hi);
        const Scalar incl = rng.uniform(0.02, incl_max);
        const Scalar node = rng.uniform(0, TWO_PI);
        el.normal =
            Vec3(std::sin(incl) * std::sin(node), -std::sin(incl) * std::cos(node), std::cos(incl));
        const Vec3 nvec(std::cos(node), std::sin(node), 0.0);
        el.perihelion = rotate_about(el.normal, nvec, rng.uniform(0, TWO_PI));
        el.ell = rng.uniform(0, TWO_PI);
        els[i] = el;
    }
    CartesianState st = state_from_elements(els, ms);
    const Mat3 R = rot_x(rng.uniform(0.3, 0.8));
    st.y = R * st.y;
    st.x = R * st.x;
    return st;
}

Scalar state_distance(const CartesianState& a, const CartesianState& b) {
    const Scalar scale = std::max({a.y.cwiseAbs().maxCoeff(), a.x.cwiseAbs().maxCoeff(), 1.0});
    return std::max((a.y - b.y).cwiseAbs().maxCoeff(), (a.x - b.x).cwiseAbs().maxCoeff()) / scale;
}

QuadratureSpec quadrature_from(const Config& cfg) {
    QuadratureSpec spec;
    spec.n0 = static_cast<int>(cfg.integer_or("quadrature", "n0", 32));
    spec.n_max = static_cast<int>(cfg.integer_or("quadrature", "n_max", 2048));
    spec.tol = cfg.scalar_or("quadrature", "tol", 1e-10);
    if (spec.n0 < 8) throw config_error("quadrature.n0 must be at least 8", 0);
    return spec;
}

/// base point of the outer-pair quadrupole portrait (two planets)
PStarCoords portrait_base_from(const Config& cfg, SystemMasses& ms_out) {
    const Scalar a_in = cfg.scalar_or("portrait", "a_inner", 1.0);
    const Scalar a_out = cfg.scalar_or("portrait", "a_outer", 5.0);
    const Scalar m_in = cfg.scalar_or("portrait", "m_inner", 1.0);
    const Scalar m_out = cfg.scalar_or("portrait", "m_outer", 0.14);
    const Scalar e_out = cfg.scalar_or("portrait", "e_outer", 0.45);
    ms_out = SystemMasses(1.0, cfg.scalar_or("system", "mu", 1e-3), {m_in, m_out});

    PStarCoords ps;
    ps.Lambda.resize(2);
    ps.chi.resize(2);
    ps.Theta.resize(2);
    ps.ell.resize(2);
    ps.kappa.resize(2);
    ps.vartheta.resize(2);
    ps.Lambda[0] = ms_out.lambda_of_a(0, a_in);
    ps.Lambda[1] = ms_out.lambda_of_a(1, a_out);
    ps.chi[1] = std::sqrt(1.0 - e_out * e_out) * ps.Lambda[1];
    ps.chi[0] = cfg.scalar_or("portrait", "chi0", 1.15);
    ps.Theta[0] = cfg.scalar_or("portrait", "theta0", 0.2 * ps.chi[0]);
    ps.Theta[1] = 0.0;
    ps.ell << 0.0, 0.0;
    ps.kappa << 1.1, 2.3;
    ps.vartheta << 0.7, PI;
    return ps;
}

std::string out_path(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

// ------------------------------------------------------------- experiments

void exp_charts_roundtrip(const Config& cfg, const RunOptions& opts, Summary& sum,
                          std::uint64_t seed) {
    const SystemMasses ms = masses_from(cfg);
    const int count = static_cast<int>(cfg.integer_or("sample", "count", 1000));
    const Scalar tol = cfg.scalar_or("sample", "tol", 1e-9);

    std::vector<CartesianState> states(count);
    {
        SplitMix64 rng(derive_stream(seed, 1));
        for (int i = 0; i < count; ++i) states[i] = sample_state(rng, ms);
    }

    CsvWriter csv(out_path(opts.out_dir, "roundtrip.csv"));
    csv.header({"chart", "samples", "max_rel_err", "tol", "status"});
    const struct {
        const char* name;
        ChartId id;
    } charts[] = {{"delaunay", ChartId::delaunay},
                  {"poincare", ChartId::poincare},
                  {"pstar", ChartId::pstar}};
    for (const auto& ch : charts) {
        std::vector<Scalar> errs(count, 0.0);
        parallel_for(count, opts.jobs, [&](int i) {
            CartesianState back;
            switch (ch.id) {
                case ChartId::delaunay: back = from_delaunay(to_delaunay(states[i], ms), ms); break;
                case ChartId::poincare: back = from_poincare(to_poincare(states[i], ms), ms); break;
                default: back = from_pstar(to_pstar(states[i], ms), ms); break;
            }
            errs[i] = state_distance(states[i], back);
        });
        const Scalar worst = *std::max_element(errs.begin(), errs.end());
        sum.check_below(std::string(ch.name) + "-roundtrip", worst, tol);
        csv.row({ch.name, CsvWriter::integer(count), CsvWriter::num(worst), CsvWriter::num(tol),
                 worst < tol ? "pass" : "fail"});
    }
}

void exp_symplecticity(const Config& cfg, const RunOptions& opts, Summary& sum,
                       std::uint64_t seed) {
    const std::vector<Scalar> n_values = cfg.list_or("sample", "n_values", {2.0, 3.0});
    const int points = static_cast<int>(cfg.integer_or("sample", "points", 100));
    const Scalar tol = cfg.scalar_or("sample", "tol", 1e-6);
    const Scalar mu = cfg.scalar_or("system", "mu", 1e-3);

    CsvWriter csv(out_path(opts.out_dir, "symplecticity.csv"));
    csv.header({"chart", "n", "points", "max_defect", "tol", "status"});
    for (Scalar nv : n_values) {
        const int n = static_cast<int>(nv);
        SystemMasses ms(1.0, mu, std::vector<Scalar>(n, 1.0));
        SplitMix64 rng(derive_stream(seed, 100 + n));
        std::vector<CartesianState> pts(points);
        for (int i = 0; i < points; ++i) pts[i] = sample_state(rng, ms);
        const struct {
            const char* name;
            ChartId id;
        } charts[] = {{"delaunay", ChartId::delaunay},
                      {"poincare", ChartId::poincare},
                      {"pstar", ChartId::pstar}};
        for (const auto& ch : charts) {
            std::vector<Scalar> defects(points, 0.0);
            parallel_for(points, opts.jobs, [&](int i) {
                const SymplecticityReport rep =
                    symplecticity_test(ch.id, {pts[i]}, ms, ChartGuards{});
                defects[i] = rep.tested ? rep.max_defect : 0.0;
            });
            const Scalar worst = *std::max_element(defects.begin(), defects.end());
            sum.check_below(std::string(ch.name) + "-two-form-defect-n" + std::to_string(n), worst,
                            tol);
            csv.row({ch.name, CsvWriter::integer(n), CsvWriter::integer(points),
                     CsvWriter::num(worst), CsvWriter::num(tol), worst < tol ? "pass" : "fail"});
        }
    }
}

void exp_dalembert(const Config& cfg, const RunOptions& opts, Summary& sum, std::uint64_t seed) {
    const SystemMasses ms = masses_from(cfg);
    const int n = ms.count();
    const std::vector<Scalar> a = cfg.list("system", "a");
    VecX Lambda(n);
    for (int i = 0; i < n; ++i) Lambda[i] = ms.lambda_of_a(i, a[i]);
    const QuadratureSpec spec = quadrature_from(cfg);
    const int count = static_cast<int>(cfg.integer_or("sample", "count", 50));
    const Scalar parity_tol = cfg.scalar_or("sample", "parity_tol", 1e-9);
    const Scalar grad_tol = cfg.scalar_or("sample", "gradient_tol", 1e-8);

    const PoincareSecular f(Lambda, ms, spec);
    SplitMix64 rng(derive_stream(seed, 7));
    std::vector<VecX> samples;
    for (int i = 0; i < count; ++i) {
        VecX z(4 * n);
        for (int c = 0; c < 4 * n; ++c)
            z[c] = 0.12 * std::sqrt(Lambda[c % n]) * rng.uniform(-1, 1);
        samples.push_back(z);
    }
    const ParityReport rep = dalembert_parity_test(f, n, samples, {0.4, 1.9, 3.7});

    CsvWriter csv(out_path(opts.out_dir, "dalembert.csv"));
    csv.header({"check", "value", "tol", "status"});
    auto emit = [&](const std::string& name, Scalar v, Scalar tol) {
        sum.check_below(name, v, tol);
        csv.row({name, CsvWriter::num(v), CsvWriter::num(tol), v < tol ? "pass" : "fail"});
    };
    emit("parity-flip-xi-p", rep.defect_flip_xi_p, parity_tol);
    emit("parity-flip-eta-q", rep.defect_flip_eta_q, parity_tol);
    emit("parity-flip-p-q", rep.defect_flip_p_q, parity_tol);
    emit("rotation-invariance", rep.rotation_defect, parity_tol);
    emit("gradient-at-origin", rep.gradient_norm_at_0, grad_tol);
}

void exp_secular_identities(const Config& cfg, const RunOptions& opts, Summary& sum,
                            std::uint64_t seed) {
    const int count = static_cast<int>(cfg.integer_or("sample", "count", 100));
    const Scalar tol = cfg.scalar_or("sample", "tol", 1e-10);
    const QuadratureSpec spec = quadrature_from(cfg);
    const SystemMasses ms(1.0, 1e-3, {1.0, 0.9});

    SplitMix64 rng(derive_stream(seed, 11));
    Scalar worst_invr = 0, worst_y = 0, worst_xr3 = 0;
    for (int i = 0; i < count; ++i) {
        EllipseElements el;
        el.a = rng.uniform(0.4, 4.0);
        el.e = rng.uniform(0.0, 0.9);
        const Scalar z = rng.uniform(-1, 1), ph = rng.uniform(0, TWO_PI);
        const Scalar r = std::sqrt(std::max(0.0, 1 - z * z));
        el.normal = Vec3(r * std::cos(ph), r * std::sin(ph), z);
        Vec3 seed_dir(rng.normal(), rng.normal(), rng.normal());
        seed_dir -= el.normal * el.normal.dot(seed_dir);
        el.perihelion = seed_dir.normalized();
        el.ell = 0;
        const OrbitAverages av = orbit_averages(el, ms, 0, spec);
        worst_invr = std::max(worst_invr, std::abs(av.inv_r - 1 / el.a) * el.a);
        worst_y = std::max(worst_y, av.y.norm());
        worst_xr3 = std::max(worst_xr3, av.x_over_r3.norm() * el.a * el.a);
    }

    Scalar worst_indirect = 0, worst_k0 = 0, worst_k1 = 0;
    for (int i = 0; i < std::min(count, 20); ++i) {
        SplitMix64 local(derive_stream(seed, 500 + i));
        const CartesianState st = sample_state(local, ms, 0.1, 0.5, 0.35);
        std::vector<EllipseElements> els(2);
        for (int b = 0; b < 2; ++b)
            els[b] = cartesian_to_elements(st.y.col(b), st.x.col(b), ms, b);
        worst_indirect = std::max(worst_indirect,
                                  std::abs(indirect_pair_average(els[0], els[1], ms, 0, 1, spec)));
        if (els[0].a / els[1].a < 0.5) {
            const Scalar k0 = pair_order_term(0, els[0], els[1], ms, 0, 1, spec);
            worst_k0 = std::max(worst_k0,
                                std::abs(k0 + ms.m[0] * ms.m[1] / els[1].a) * els[1].a);
            worst_k1 =
                std::max(worst_k1, std::abs(pair_order_term(1, els[0], els[1], ms, 0, 1, spec)));
        }
    }

    CsvWriter csv(out_path(opts.out_dir, "secular_identities.csv"));
    csv.header({"identity", "worst", "tol", "status"});
    auto emit = [&](const std::string& name, Scalar v, Scalar t) {
        sum.check_below(name, v, t);
        csv.row({name, CsvWriter::num(v), CsvWriter::num(t), v < t ? "pass" : "fail"});
    };
    emit("mean-inverse-radius", worst_invr, tol);
    emit("mean-momentum", worst_y, tol);
    emit("mean-x-over-r3", worst_xr3, tol);
    emit("indirect-average", worst_indirect, tol);
    emit("order0-value", worst_k0, tol);
    emit("order1-vanishes", worst_k1, tol);
}

void exp_integrability_probe(const Config& cfg, const RunOptions& opts, Summary& sum,
                             std::uint64_t seed) {
    (void)seed;
    SystemMasses ms;
    const PStarCoords base = portrait_base_from(cfg, ms);
    const QuadratureSpec spec = quadrature_from(cfg);
    const Scalar tol = cfg.scalar_or("sample", "tol", 1e-10);
    const Scalar control_floor = cfg.scalar_or("sample", "control_floor", 1e-4);
    const int grid_n = static_cast<int>(cfg.integer_or("sample", "grid", 32));

    SecularTerm term;
    term.i = 0;
    term.j = 1;
    term.order = 2;
    term.quadrature = spec;

    VecX kappa_grid(grid_n);
    for (int i = 0; i < grid_n; ++i) kappa_grid[i] = TWO_PI * i / grid_n;
    const DependenceProbeResult kres =
        dependence_probe(term, base, ms, PStarBlock::kappa, 1, kappa_grid);

    VecX tgrid = VecX::LinSpaced(grid_n, PI - 0.6, PI + 0.6);
    const DependenceProbeResult tres =
        dependence_probe(term, base, ms, PStarBlock::vartheta, 1, tgrid);

    CsvWriter csv(out_path(opts.out_dir, "integrability_probe.csv"));
    csv.header({"probe", "coordinate", "grid_points", "evaluated", "max_variation"});
    csv.row({"quadrupole-ignores", "kappa_last", CsvWriter::integer(grid_n),
             CsvWriter::integer(kres.evaluated), CsvWriter::num(kres.max_variation)});
    csv.row({"quadrupole-depends-on", "vartheta_last", CsvWriter::integer(grid_n),
             CsvWriter::integer(tres.evaluated), CsvWriter::num(tres.max_variation)});

    sum.check("quadrupole-kappa-grid-complete", kres.evaluated, grid_n,
              kres.evaluated == grid_n);
    sum.check_below("quadrupole-independent-of-kappa", kres.max_variation, tol);
    sum.check_above("quadrupole-depends-on-vartheta", tres.max_variation, control_floor);
}

void exp_phase_portrait(const Config& cfg, const RunOptions& opts, Summary& sum,
                        std::uint64_t seed) {
    (void)seed;
    SystemMasses ms;
    const PStarCoords base = portrait_base_from(cfg, ms);
    const QuadratureSpec spec = quadrature_from(cfg);
    const int N = static_cast<int>(cfg.integer_or("portrait", "grid", 64));
    const Scalar theta_band = cfg.scalar_or("portrait", "theta_band", 0.2);
    const Scalar vartheta_band = cfg.scalar_or("portrait", "vartheta_band", 0.6);

    const VecX tg = VecX::LinSpaced(N, -theta_band, theta_band);
    const VecX vg = VecX::LinSpaced(N, PI - vartheta_band, PI + vartheta_band);
    const PhasePortrait pp = quadrupole_phase_portrait(base, ms, tg, vg, spec);

    CsvWriter csv(out_path(opts.out_dir, "phase_portrait.csv"));
    csv.header({"theta", "vartheta", "value"});
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            csv.row({CsvWriter::num(tg[a]), CsvWriter::num(vg[b]),
                     CsvWriter::num(pp.values(a, b))});

    // critical point at the planar configuration
    SecularTerm term;
    term.i = 0;
    term.j = 1;
    term.order = 2;
    term.quadrature = spec;
    PStarCoords at = base;
    at.Theta[1] = 0.0;
    at.vartheta[1] = PI;
    const Scalar delta = 1e-4;
    PStarCoords p1 = at, p2 = at;
    p1.Theta[1] += delta;
    p2.Theta[1] -= delta;
    const Scalar gT = std::abs(term.eval_pstar(p1, ms) - term.eval_pstar(p2, ms)) / (2 * delta);
    p1 = at;
    p2 = at;
    p1.vartheta[1] += delta;
    p2.vartheta[1] -= delta;
    const Scalar gV = std::abs(term.eval_pstar(p1, ms) - term.eval_pstar(p2, ms)) / (2 * delta);
    sum.check_below("planar-point-gradient-theta", gT, 1e-7);
    sum.check_below("planar-point-gradient-vartheta", gV, 1e-7);

    Scalar sym = 0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            const Scalar v1 = pp.values(a, b), v2 = pp.values(N - 1 - a, N - 1 - b);
            if (!std::isnan(v1) && !std::isnan(v2)) sym = std::max(sym, std::abs(v1 - v2));
        }
    sum.check_below("portrait-reflection-symmetry", sym, 1e-9);
}

void exp_birkhoff(const Config& cfg, const RunOptions& opts, Summary& sum, std::uint64_t seed) {
    const SystemMasses ms = masses_from(cfg);
    const int n = ms.count();
    const std::vector<Scalar> a = cfg.list("system", "a");
    VecX Lambda(n);
    for (int i = 0; i < n; ++i) Lambda[i] = ms.lambda_of_a(i, a[i]);
    BirkhoffOptions bopts;
    bopts.quadrature = quadrature_from(cfg);

    const BirkhoffInvariants inv = compute_invariants(Lambda, ms, bopts);
    CsvWriter csv(out_path(opts.out_dir, "birkhoff.csv"));
    std::vector<std::string> head{"quantity"};
    for (int i = 0; i < n; ++i) head.push_back("c" + std::to_string(i));
    csv.header(head);
    std::vector<std::string> row{"sigma"};
    for (int i = 0; i < n; ++i) row.push_back(CsvWriter::num(inv.sigma[i]));
    csv.row(row);
    row.assign({"varsigma"});
    for (int i = 0; i < n; ++i) row.push_back(CsvWriter::num(inv.varsigma[i]));
    csv.row(row);
    row.assign({"C0"});
    row.push_back(CsvWriter::num(inv.C0));
    for (int i = 1; i < n; ++i) row.push_back("");
    csv.row(row);

    // remainder of the quadratic model along a fixed ray
    const PoincareSecular f(Lambda, ms, bopts.quadrature);
    SplitMix64 rng(derive_stream(seed, 13));
    VecX dir(4 * n);
    for (int c = 0; c < 4 * n; ++c) dir[c] = rng.uniform(-1, 1) * std::sqrt(Lambda[c % n]) / 3;
    std::vector<Scalar> ts{0.05, 0.1, 0.2}, rem;
    for (Scalar t : ts) {
        const VecX z = t * dir;
        Scalar quad = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                quad += inv.Qh(i, j) * (z[i] * z[j] + z[n + i] * z[n + j]);
                quad += inv.Qv(i, j) * (z[2 * n + i] * z[2 * n + j] + z[3 * n + i] * z[3 * n + j]);
            }
        rem.push_back(std::abs(f(z) - inv.C0 - quad));
    }
    Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sx += std::log(ts[i]);
        sy += std::log(rem[i]);
        sxx += std::log(ts[i]) * std::log(ts[i]);
        sxy += std::log(ts[i]) * std::log(rem[i]);
    }
    const Scalar slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    sum.check("quartic-remainder-slope", slope, 4.0, slope > 3.5 && slope < 4.5);

    const ResonanceResiduals res = resonance_check(inv);
    sum.check_below("eigenvalue-near-zero", res.varsigma_n_rel(), 1e-8);
    sum.check_below("spectrum-trace-sum", res.trace_sum_rel(), 1e-8);
}

void exp_resonances(const Config& cfg, const RunOptions& opts, Summary& sum, std::uint64_t seed) {
    const std::vector<Scalar> n_values = cfg.list_or("sample", "n_values", {2.0, 3.0, 4.0});
    const int count = static_cast<int>(cfg.integer_or("sample", "count", 20));
    const Scalar tol = cfg.scalar_or("sample", "tol", 1e-8);
    const Scalar mu = cfg.scalar_or("system", "mu", 1e-3);

    CsvWriter csv(out_path(opts.out_dir, "resonances.csv"));
    csv.header({"n", "sample", "varsigma_n_rel", "trace_sum_rel", "status"});
    for (Scalar nv : n_values) {
        const int n = static_cast<int>(nv);
        std::vector<Scalar> worst_s(count, 0.0), worst_t(count, 0.0);
        parallel_for(count, opts.jobs, [&](int i) {
            SplitMix64 rng(derive_stream(seed, 1000 * n + i));
            SystemMasses ms(1.0, mu, std::vector<Scalar>(n, 1.0));
            for (int b = 0; b < n; ++b) ms.m[b] = rng.uniform(0.5, 1.5);
            std::vector<Scalar> a(n);
            a[0] = rng.uniform(0.8, 1.2);
            for (int b = 1; b < n; ++b) a[b] = a[b - 1] / rng.uniform(0.08, 0.18);
            VecX Lambda(n);
            for (int b = 0; b < n; ++b) Lambda[b] = ms.lambda_of_a(b, a[b]);
            const ResonanceResiduals res = resonance_check(compute_invariants(Lambda, ms));
            worst_s[i] = res.varsigma_n_rel();
            worst_t[i] = res.trace_sum_rel();
        });
        Scalar ws = 0, wt = 0;
        for (int i = 0; i < count; ++i) {
            csv.row({CsvWriter::integer(n), CsvWriter::integer(i), CsvWriter::num(worst_s[i]),
                     CsvWriter::num(worst_t[i]),
                     (worst_s[i] < tol && worst_t[i] < tol) ? "pass" : "fail"});
            ws = std::max(ws, worst_s[i]);
            wt = std::max(wt, worst_t[i]);
        }
        sum.check_below("degeneracy-zero-eigenvalue-n" + std::to_string(n), ws, tol);
        sum.check_below("degeneracy-trace-sum-n" + std::to_string(n), wt, tol);
    }
}

/// single-scale verdict written independently of the filtration machinery
bool classical_single_scale(const VecX& omega, Scalar gamma, Scalar tau, int K) {
    std::vector<long> k(omega.size(), 0);
    std::function<bool(int, int)> rec = [&](int pos, int remaining) -> bool {
        if (pos == static_cast<int>(omega.size())) {
            long l1 = 0;
            Scalar dot = 0;
            for (std::size_t d = 0; d < k.size(); ++d) {
                l1 += std::labs(k[d]);
                dot += omega[static_cast<Eigen::Index>(d)] * static_cast<Scalar>(k[d]);
            }
            if (l1 == 0) return true;
            return std::abs(dot) >= gamma / std::pow(static_cast<Scalar>(l1), tau);
        }
        for (int v = -remaining; v <= remaining; ++v) {
            k[pos] = v;
            if (!rec(pos + 1, remaining - std::abs(v))) return false;
        }
        k[pos] = 0;
        return true;
    };
    return rec(0, K);
}

void exp_dio_measure(const Config& cfg, const RunOptions& opts, Summary& sum,
                     std::uint64_t seed) {
    DioFiltration filt;
    const std::vector<Scalar> parts = cfg.list_or("diophantine", "nu_parts", {2.0});
    for (Scalar p : parts) filt.nu_parts.push_back(static_cast<int>(p));
    filt.tau = cfg.scalar_or("diophantine", "tau", 2.0);
    filt.K = static_cast<int>(cfg.integer_or("diophantine", "K", 20));
    const auto box = cfg.ranges("diophantine", "box");
    const int samples = static_cast<int>(cfg.integer_or("diophantine", "samples", 20000));
    const std::vector<Scalar> sweep =
        cfg.list_or("diophantine", "gamma_sweep", {0.32, 0.16, 0.08, 0.04});
    const bool check_slope = cfg.integer_or("diophantine", "check_slope", 1) != 0;
    const int m = static_cast<int>(filt.nu_parts.size());

    CsvWriter csv(out_path(opts.out_dir, "dio_measure.csv"));
    csv.header({"gamma", "K", "tau", "density", "ci_low", "ci_high", "samples", "seed"});
    std::vector<MeasureResult> results(sweep.size());
    parallel_for(static_cast<int>(sweep.size()), opts.jobs, [&](int i) {
        DioFiltration f = filt;
        f.gammas = VecX::Constant(m, sweep[i]);
        // all block scales follow the sweep value proportionally
        for (int b = 1; b < m; ++b) f.gammas[b] = sweep[i] / std::pow(10.0, b);
        results[i] = dio_measure(box, f, samples, derive_stream(seed, 40 + i));
    });
    bool monotone = true;
    std::vector<Scalar> complements;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const MeasureResult& r = results[i];
        csv.row({CsvWriter::num(sweep[i]), CsvWriter::integer(filt.K), CsvWriter::num(filt.tau),
                 CsvWriter::num(r.density), CsvWriter::num(r.ci_low), CsvWriter::num(r.ci_high),
                 CsvWriter::integer(r.samples), CsvWriter::integer(static_cast<long long>(r.seed))});
        if (i > 0 && results[i].density < results[i - 1].density - 1e-12) monotone = false;
        complements.push_back(std::max(1e-12, 1.0 - r.density));
    }
    sum.check("density-monotone-in-gamma", monotone ? 1.0 : 0.0, 1.0, monotone);

    if (check_slope && sweep.size() >= 3) {
        Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int nn = static_cast<int>(sweep.size());
        for (int i = 0; i < nn; ++i) {
            sx += std::log(sweep[i]);
            sy += std::log(complements[i]);
            sxx += std::log(sweep[i]) * std::log(sweep[i]);
            sxy += std::log(sweep[i]) * std::log(complements[i]);
        }
        const Scalar slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        sum.check("complement-measure-slope", slope, 1.0, slope > 0.7 && slope < 1.3);
    }

    if (m == 1 && cfg.integer_or("diophantine", "m1_check_samples", 10000) > 0) {
        const int eq_samples = static_cast<int>(cfg.integer("diophantine", "m1_check_samples"));
        SplitMix64 rng(derive_stream(seed, 90));
        DioFiltration f = filt;
        f.gammas = VecX::Constant(1, sweep.back());
        int mismatches = 0;
        const int dim = filt.dim();
        for (int i = 0; i < eq_samples; ++i) {
            VecX omega(dim);
            for (int d = 0; d < dim; ++d) omega[d] = rng.uniform(box[d % box.size()].first,
                                                                 box[d % box.size()].second);
            if (dio_membership(omega, f).member !=
                classical_single_scale(omega, f.gammas[0], f.tau, f.K))
                ++mismatches;
        }
        sum.check("single-scale-equivalence-mismatches", mismatches, 1.0, mismatches == 0);
    }

    if (cfg.integer_or("diophantine", "golden_check", 1) != 0) {
        VecX omega(2);
        omega << 1.0, (1.0 + std::sqrt(5.0)) / 2.0;
        DioFiltration f;
        f.nu_parts = {2};
        f.gammas = VecX::Constant(1, 0.2);
        f.tau = 1.0;
        f.K = 50;
        const MembershipResult r = dio_membership(omega, f);
        sum.check("golden-pair-member-K50", r.worst.ratio, 1.0, r.member);
    }
}

void exp_kam_budget(const Config& cfg, const RunOptions& opts, Summary& sum, std::uint64_t seed) {
    (void)seed;
    KamBudgetInputs in;
    in.M = cfg.scalar_or("kam", "M", 1.0);
    const std::vector<Scalar> mk = cfg.list("kam", "M_k");
    in.M_k = Eigen::Map<const VecX>(mk.data(), mk.size());
    in.Mbar = cfg.scalar_or("kam", "Mbar", 1.0);
    if (cfg.has("kam", "Mbar_k")) {
        const std::vector<Scalar> mbk = cfg.list("kam", "Mbar_k");
        in.Mbar_k = Eigen::Map<const VecX>(mbk.data(), mbk.size());
    }
    in.E = cfg.scalar_or("kam", "E", 1e-9);
    in.s = cfg.scalar_or("kam", "s", 0.1);
    in.sbar = cfg.scalar_or("kam", "sbar", 0.5);
    in.rho = cfg.scalar_or("kam", "rho", 1.0);
    in.tau_star = cfg.scalar_or("kam", "tau_star", static_cast<Scalar>(in.M_k.size()) + 1.0);
    const std::vector<Scalar> g = cfg.list("kam", "gammas");
    in.gammas = Eigen::Map<const VecX>(g.data(), g.size());
    in.L = cfg.scalar_or("kam", "L", -1.0);
    in.c_hat = cfg.scalar_or("kam", "c_hat", 1.0);

    if (cfg.has("kam", "heuristic_mu")) {
        KamHeuristic h;
        h.mu = cfg.scalar("kam", "heuristic_mu");
        h.alpha = cfg.scalar_or("kam", "heuristic_alpha", 0.1);
        h.Kbar = cfg.scalar_or("kam", "heuristic_Kbar", 10.0);
        h.e0_power = cfg.scalar_or("kam", "heuristic_e0_power", 1.0);
        h.l0_power = cfg.scalar_or("kam", "heuristic_l0_power", 1.0);
        apply_heuristic(in, h);
    }

    const KamBudgetReport rep = kam_budget(in);
    CsvWriter csv(out_path(opts.out_dir, "kam_budget.csv"));
    csv.header({"quantity", "value"});
    csv.row({"L", CsvWriter::num(rep.L)});
    csv.row({"K", CsvWriter::num(rep.K)});
    for (int i = 0; i < rep.rho_hat_k.size(); ++i)
        csv.row({"rho_hat_" + std::to_string(i + 1), CsvWriter::num(rep.rho_hat_k[i])});
    csv.row({"rho_hat", CsvWriter::num(rep.rho_hat)});
    csv.row({"E_hat", CsvWriter::num(rep.E_hat)});
    csv.row({"condition", CsvWriter::num(rep.condition)});
    csv.row({"smallness_holds", rep.pass ? "1" : "0"});

    sum.check("budget-finite", std::isfinite(rep.condition) ? 1.0 : 0.0, 1.0,
              std::isfinite(rep.condition));
    sum.info("smallness-condition-value", rep.condition);
    sum.info("smallness-condition-holds", rep.pass ? 1.0 : 0.0);
}

void exp_integrate(const Config& cfg, const RunOptions& opts, Summary& sum, std::uint64_t seed) {
    (void)seed;
    const SystemMasses ms = masses_from(cfg);
    const CartesianState s0 = system_from(cfg, ms);
    IntegratorOptions iopt;
    iopt.dt = cfg.scalar("integrator", "dt");
    iopt.t_end = cfg.scalar("integrator", "t_end");
    iopt.stride = static_cast<int>(cfg.integer_or("integrator", "stride", 100));
    const std::string method = cfg.str_or("integrator", "method", "gauss6");
    if (method == "gauss6")
        iopt.method = Method::gauss6;
    else if (method == "wh2")
        iopt.method = Method::wh2;
    else
        throw config_error("integrator.method must be gauss6 or wh2", 0);

    const Trajectory tr = integrate(s0, ms, iopt);

    const int n = ms.count();
    {
        CsvWriter csv(out_path(opts.out_dir, "trajectory.csv"));
        std::vector<std::string> head{"t"};
        for (int b = 0; b < n; ++b)
            for (const char* c : {"x", "y", "z"})
                head.push_back("y" + std::to_string(b) + "_" + c);
        for (int b = 0; b < n; ++b)
            for (const char* c : {"x", "y", "z"})
                head.push_back("x" + std::to_string(b) + "_" + c);
        csv.header(head);
        for (std::size_t i = 0; i < tr.states.size(); ++i) {
            std::vector<std::string> row{CsvWriter::num(tr.times[i])};
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < 3; ++c) row.push_back(CsvWriter::num(tr.states[i].y(c, b)));
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < 3; ++c) row.push_back(CsvWriter::num(tr.states[i].x(c, b)));
            csv.row(row);
        }
    }

    const VecX E = energy_series(tr, ms);
    const Mat3X C = angular_momentum_series(tr);
    const bool want_pstar = cfg.integer_or("assert", "pstar_integrals", 1) != 0;
    {
        CsvWriter csv(out_path(opts.out_dir, "diagnostics.csv"));
        csv.header({"t", "energy", "Cx", "Cy", "Cz"});
        for (std::size_t i = 0; i < tr.states.size(); ++i)
            csv.row({CsvWriter::num(tr.times[i]), CsvWriter::num(E[i]),
                     CsvWriter::num(C(0, i)), CsvWriter::num(C(1, i)), CsvWriter::num(C(2, i))});
    }

    sum.check("trajectory-completed", tr.truncated ? 0.0 : 1.0, 1.0, !tr.truncated);
    const Scalar e_drift = (E.maxCoeff() - E.minCoeff()) / std::abs(E[0]);
    sum.check_below("energy-drift", e_drift, cfg.scalar_or("assert", "energy_tol", 1e-9));
    Scalar c_drift = 0;
    const Vec3 C0 = C.col(0);
    for (Eigen::Index i = 0; i < C.cols(); ++i)
        c_drift = std::max(c_drift, (Vec3(C.col(i)) - C0).norm() / C0.norm());
    sum.check_below("angular-momentum-drift", c_drift,
                    cfg.scalar_or("assert", "c_tol", 1e-11));

    if (want_pstar) {
        const PStarDriftReport rep = pstar_integral_drift(tr, ms);
        const Scalar tol = cfg.scalar_or("assert", "pstar_drift_tol", 1e-8);
        sum.check("chart-domain-held", rep.partial ? 0.0 : 1.0, 1.0, !rep.partial);
        sum.check_below("integral-drift-theta0", rep.theta0_drift, tol);
        sum.check_below("integral-drift-vartheta0", rep.vartheta0_drift, tol);
        sum.check_below("integral-drift-chi0", rep.chi0_drift, tol);
        sum.info("kappa0-travel", rep.kappa0_travel);
        sum.check_above("kappa0-precession-visible", rep.kappa0_travel,
                        1e4 * std::max({rep.theta0_drift, rep.chi0_drift, 1e-12}));
    }
}

} // namespace

int run_experiment(const Config& cfg, const RunOptions& opts, std::ostream& log) {
    const std::string id = cfg.str("experiment", "id");
    std::filesystem::create_directories(opts.out_dir);
    const std::uint64_t cfg_seed = cfg.u64_or("seeds", "master", 42);
    const std::uint64_t seed = opts.seed_override ? *opts.seed_override : cfg_seed;

    Summary sum(log, out_path(opts.out_dir, "summary.csv"));
    if (id == "charts-roundtrip")
        exp_charts_roundtrip(cfg, opts, sum, seed);
    else if (id == "symplecticity")
        exp_symplecticity(cfg, opts, sum, seed);
    else if (id == "dalembert")
        exp_dalembert(cfg, opts, sum, seed);
    else if (id == "secular-identities")
        exp_secular_identities(cfg, opts, sum, seed);
    else if (id == "integrability-probe")
        exp_integrability_probe(cfg, opts, sum, seed);
    else if (id == "phase-portrait")
        exp_phase_portrait(cfg, opts, sum, seed);
    else if (id == "birkhoff")
        exp_birkhoff(cfg, opts, sum, seed);
    else if (id == "resonances")
        exp_resonances(cfg, opts, sum, seed);
    else if (id == "dio-measure")
        exp_dio_measure(cfg, opts, sum, seed);
    else if (id == "kam-budget")
        exp_kam_budget(cfg, opts, sum, seed);
    else if (id == "integrate")
        exp_integrate(cfg, opts, sum, seed);
    else
        throw config_error("unknown experiment id '" + id + "'", 0);

    cfg.ensure_consumed();
    log << (sum.all_passed() ? "ALL CHECKS PASSED\n" : "SOME CHECKS FAILED\n");
    return sum.all_passed() ? 0 : 1;
}

int plot_csv(const std::string& csv_path, const std::string& kind, const std::string& out_svg,
             std::ostream& log) {
    CsvTable table;
    try {
        table = read_csv(csv_path);
    } catch (const std::exception& err) {
        log << "plot: " << err.what() << "\n";
        return 2;
    }
    if (table.rows.empty()) {
        log << "plot: no data rows in " << csv_path << "\n";
        return 2;
    }

    try {
        const auto cols = numeric_columns(table);
        if (kind == "line") {
            if (cols.size() < 2) {
                log << "plot: line charts need at least two numeric columns\n";
                return 2;
            }
            std::vector<LineSeries> series;
            for (std::size_t c = 1; c < cols.size(); ++c)
                series.push_back(LineSeries{table.header[c], cols[0], cols[c]});
            write_line_svg(out_svg, series, table.header[0]);
        } else if (kind == "heatmap") {
            if (cols.size() < 3) {
                log << "plot: heatmaps need three numeric columns\n";
                return 2;
            }
            std::vector<Scalar> xs = cols[0], ys = cols[1];
            std::sort(xs.begin(), xs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            std::sort(ys.begin(), ys.end());
            ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
            MatX raster = MatX::Constant(xs.size(), ys.size(),
                                         std::numeric_limits<Scalar>::quiet_NaN());
            for (std::size_t r = 0; r < cols[0].size(); ++r) {
                const auto xi = std::lower_bound(xs.begin(), xs.end(), cols[0][r]) - xs.begin();
                const auto yi = std::lower_bound(ys.begin(), ys.end(), cols[1][r]) - ys.begin();
                raster(xi, yi) = cols[2][r];
            }
            Scalar lo = std::numeric_limits<Scalar>::max(), hi = std::numeric_limits<Scalar>::lowest();
            for (Eigen::Index i = 0; i < raster.size(); ++i)
                if (std::isfinite(raster.data()[i])) {
                    lo = std::min(lo, raster.data()[i]);
                    hi = std::max(hi, raster.data()[i]);
                }
            std::vector<Scalar> levels;
            for (int l = 1; l <= 8; ++l) levels.push_back(lo + (hi - lo) * l / 9.0);
            write_heatmap_svg(out_svg, xs, ys, raster, levels,
                              table.header[2] + " over (" + table.header[0] + ", " +
                                  table.header[1] + ")");
        } else {
            log << "plot: unknown kind '" << kind << "'\n";
            return 2;
        }
    } catch (const std::exception& err) {
        log << "plot: " << err.what() << "\n";
        std::filesystem::remove(out_svg);
        return 2;
    }
    log << "wrote " << out_svg << "\n";
    return 0;
}

} // namespace orblab
