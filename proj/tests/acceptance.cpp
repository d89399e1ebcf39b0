// Acceptance suite: every structural claim the library is built to verify,
// one criterion per line, fixed tolerances, deterministic seeds.

#include "oracles.hpp"

#include "orblab/birkhoff.hpp"
#include "orblab/charts.hpp"
#include "orblab/diophantine.hpp"
#include "orblab/dynamics.hpp"
#include "orblab/secular.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace orblab;

namespace {

int failures = 0;

void criterion(int number, const std::string& label, const std::function<bool(std::string&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& err) {
        detail = std::string("exception: ") + err.what();
    }
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", ok ? "PASS" : "FAIL", number,
                label.c_str(), detail.c_str(), sec);
    std::fflush(stdout);
    if (!ok) ++failures;
}

Mat3 rot_x(Scalar t) {
    Mat3 R;
    R << 1, 0, 0, 0, std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t);
    return R;
}

CartesianState domain_state(SplitMix64& rng, const SystemMasses& ms) {
    CartesianState st = state_from_elements(
        oracles::random_system_elements(rng, ms.count(), 0.15, 0.5, 0.35), ms);
    const Mat3 R = rot_x(rng.uniform(0.3, 0.8));
    st.y = R * st.y;
    st.x = R * st.x;
    return st;
}

Scalar state_distance(const CartesianState& a, const CartesianState& b) {
    const Scalar scale = std::max({a.y.cwiseAbs().maxCoeff(), a.x.cwiseAbs().maxCoeff(), 1.0});
    return std::max((a.y - b.y).cwiseAbs().maxCoeff(), (a.x - b.x).cwiseAbs().maxCoeff()) / scale;
}

std::string fmt(const char* pattern, Scalar a, Scalar b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

// two-planet base point for the quadrupole probes: moderate inner
// eccentricity across the whole (Theta, vartheta) window
PStarCoords quadrupole_base(SystemMasses& ms) {
    ms = SystemMasses(1.0, 1e-3, {1.0, 0.14});
    PStarCoords ps;
    ps.Lambda.resize(2);
    ps.chi.resize(2);
    ps.Theta.resize(2);
    ps.ell.resize(2);
    ps.kappa.resize(2);
    ps.vartheta.resize(2);
    ps.Lambda[0] = ms.lambda_of_a(0, 1.0);
    ps.Lambda[1] = ms.lambda_of_a(1, 5.0);
    ps.chi[1] = std::sqrt(1.0 - 0.45 * 0.45) * ps.Lambda[1];
    ps.chi[0] = 1.15;
    ps.Theta << 0.23, 0.0;
    ps.ell << 0.0, 0.0;
    ps.kappa << 1.1, 2.3;
    ps.vartheta << 0.7, PI;
    return ps;
}

} // namespace

int main() {
    const SystemMasses MS3(1.0, 1e-3, {1.0, 0.8, 1.3});

    criterion(1, "chart round trips at 1e-9 on 1000 domain points per chart", [&](std::string& d) {
        SplitMix64 rng(1001);
        Scalar worst = 0;
        for (int i = 0; i < 1000; ++i) {
            const CartesianState st = domain_state(rng, MS3);
            worst = std::max(worst, state_distance(st, from_delaunay(to_delaunay(st, MS3), MS3)));
            worst = std::max(worst, state_distance(st, from_poincare(to_poincare(st, MS3), MS3)));
            worst = std::max(worst, state_distance(st, from_pstar(to_pstar(st, MS3), MS3)));
        }
        d = fmt("worst=%.2e tol=%.0e", worst, 1e-9);
        return worst < 1e-9;
    });

    criterion(2, "canonicity of the node chart: two-form defect at 100 points, n in {2,3}",
              [&](std::string& d) {
                  Scalar worst = 0;
                  for (int n : {2, 3}) {
                      const SystemMasses ms(1.0, 1e-3, std::vector<Scalar>(n, 1.0));
                      SplitMix64 rng(2000 + n);
                      std::vector<CartesianState> pts;
                      for (int i = 0; i < 100; ++i) pts.push_back(domain_state(rng, ms));
                      const SymplecticityReport rep =
                          symplecticity_test(ChartId::pstar, pts, ms);
                      if (rep.tested != 100) return false;
                      worst = std::max(worst, rep.max_defect);
                  }
                  d = fmt("worst=%.2e tol=%.0e", worst, 1e-6);
                  return worst < 1e-6;
              });

    criterion(3, "chart integrals: pointwise independence and drift along a 1000-period run",
              [&](std::string& d) {
                  SplitMix64 rng(3001);
                  const CartesianState st0 = domain_state(rng, MS3);
                  const PStarCoords base = to_pstar(st0, MS3);
                  const Scalar h0 = evaluate(from_pstar(base, MS3), MS3).total;
                  Scalar vary = 0;
                  for (int g = 0; g <= 10; ++g) {
                      PStarCoords ps = base;
                      ps.Theta[0] = 0.85 * base.chi[0] * (-1.0 + 0.2 * g);
                      vary = std::max(vary,
                                      std::abs(evaluate(from_pstar(ps, MS3), MS3).total - h0));
                      ps = base;
                      ps.vartheta[0] = TWO_PI * g / 11.0;
                      vary = std::max(vary,
                                      std::abs(evaluate(from_pstar(ps, MS3), MS3).total - h0));
                      ps = base;
                      ps.kappa[0] = TWO_PI * g / 11.0;
                      vary = std::max(vary,
                                      std::abs(evaluate(from_pstar(ps, MS3), MS3).total - h0));
                  }
                  if (vary >= 1e-11 * std::abs(h0)) {
                      d = fmt("grid variation %.2e exceeds %.0e relative", vary / std::abs(h0),
                              1e-11);
                      return false;
                  }

                  std::vector<EllipseElements> els(3);
                  els[0] = EllipseElements{1.0, 0.30, rot_x(0.40) * Vec3::UnitX(),
                                           rot_x(0.40) * Vec3::UnitZ(), 0.2};
                  els[1] = EllipseElements{4.0, 0.25, rot_x(0.75) * Vec3::UnitY(),
                                           rot_x(0.75) * Vec3::UnitZ(), 2.2};
                  els[2] = EllipseElements{17.0, 0.20, rot_x(0.58) * Vec3::UnitX(),
                                           rot_x(0.58) * Vec3::UnitZ(), 4.0};
                  const CartesianState s0 = state_from_elements(els, MS3);
                  IntegratorOptions opt;
                  opt.dt = TWO_PI / 150;
                  opt.t_end = 1000 * TWO_PI;
                  opt.stride = 600;
                  const Trajectory tr = integrate(s0, MS3, opt);
                  if (tr.truncated) return false;
                  const PStarDriftReport rep = pstar_integral_drift(tr, MS3);
                  if (rep.partial) return false;
                  const Scalar drift =
                      std::max({rep.theta0_drift, rep.vartheta0_drift, rep.chi0_drift});
                  d = fmt("grid+drift worst=%.2e, conjugate angle travels %.2e rad", drift,
                          rep.kappa0_travel);
                  return drift < 1e-8 && rep.kappa0_travel > 1e4 * drift &&
                         rep.kappa0_travel > 1e-3;
              });

    criterion(4, "orbit-average identities on 100 random ellipses", [&](std::string& d) {
        const SystemMasses ms(1.0, 1e-3, {1.0, 0.9});
        const QuadratureSpec spec{32, 2048, 1e-12};
        SplitMix64 rng(4001);
        Scalar worst = 0;
        for (int i = 0; i < 100; ++i) {
            const EllipseElements el = oracles::random_elements(rng, 0.4, 4.0, 0.0, 0.9);
            const OrbitAverages av = orbit_averages(el, ms, 0, spec);
            worst = std::max(worst, std::abs(av.inv_r - 1 / el.a) * el.a);
            worst = std::max(worst, av.y.norm());
            worst = std::max(worst, av.x_over_r3.norm() * el.a * el.a);
        }
        Scalar worst_ind = 0;
        for (int i = 0; i < 20; ++i) {
            const auto els = oracles::random_system_elements(rng, 2, 0.1, 0.5, 0.4);
            worst_ind = std::max(
                worst_ind, std::abs(indirect_pair_average(els[0], els[1], ms, 0, 1, spec)));
        }
        d = fmt("identities worst=%.2e, momentum-coupling average worst=%.2e", worst, worst_ind);
        return worst < 1e-10 && worst_ind < 1e-10;
    });

    criterion(5, "secular degeneracies for n in {2,3,4}, 20 spacings each", [&](std::string& d) {
        Scalar worst = 0;
        for (int n : {2, 3, 4}) {
            SplitMix64 rng(5000 + n);
            for (int rep = 0; rep < 20; ++rep) {
                SystemMasses ms(1.0, 1e-3, std::vector<Scalar>(n, 1.0));
                for (int b = 0; b < n; ++b) ms.m[b] = rng.uniform(0.5, 1.5);
                std::vector<Scalar> a(n);
                a[0] = rng.uniform(0.8, 1.2);
                for (int b = 1; b < n; ++b) a[b] = a[b - 1] / rng.uniform(0.08, 0.18);
                VecX Lambda(n);
                for (int b = 0; b < n; ++b) Lambda[b] = ms.lambda_of_a(b, a[b]);
                const ResonanceResiduals res = resonance_check(compute_invariants(Lambda, ms));
                worst = std::max({worst, res.varsigma_n_rel(), res.trace_sum_rel()});
            }
        }
        d = fmt("worst residual=%.2e tol=%.0e", worst, 1e-8);
        return worst < 1e-8;
    });

    criterion(6, "parity symmetries and the elliptic equilibrium of the averaged system",
              [&](std::string& d) {
                  const SystemMasses ms(1.0, 1e-3, {1.0, 0.9});
                  VecX Lambda(2);
                  Lambda << ms.lambda_of_a(0, 1.0), ms.lambda_of_a(1, 6.0);
                  const PoincareSecular f(Lambda, ms, QuadratureSpec{64, 2048, 1e-12});
                  SplitMix64 rng(6001);
                  std::vector<VecX> samples;
                  for (int i = 0; i < 50; ++i) {
                      VecX z(8);
                      for (int c = 0; c < 8; ++c)
                          z[c] = 0.12 * std::sqrt(Lambda[c % 2]) * rng.uniform(-1, 1);
                      samples.push_back(z);
                  }
                  const ParityReport rep =
                      dalembert_parity_test(f, 2, samples, {0.4, 1.9, 3.7});
                  const Scalar worst =
                      std::max({rep.defect_flip_xi_p, rep.defect_flip_eta_q, rep.defect_flip_p_q,
                                rep.gradient_norm_at_0});
                  d = fmt("worst defect=%.2e tol=%.0e", worst, 1e-8);
                  return worst < 1e-8;
              });

    criterion(7, "quadrupole term: flat along the last node angle, active conjugate",
              [&](std::string& d) {
                  SystemMasses ms;
                  const PStarCoords base = quadrupole_base(ms);
                  SecularTerm term;
                  term.i = 0;
                  term.j = 1;
                  term.order = 2;
                  term.quadrature = QuadratureSpec{32, 2048, 1e-12};
                  VecX kgrid(32);
                  for (int i = 0; i < 32; ++i) kgrid[i] = TWO_PI * i / 32;
                  const DependenceProbeResult kres =
                      dependence_probe(term, base, ms, PStarBlock::kappa, 1, kgrid);
                  VecX tgrid = VecX::LinSpaced(32, PI - 0.6, PI + 0.6);
                  const DependenceProbeResult tres =
                      dependence_probe(term, base, ms, PStarBlock::vartheta, 1, tgrid);
                  d = fmt("node variation=%.2e, conjugate variation=%.2e", kres.max_variation,
                          tres.max_variation);
                  return kres.evaluated == 32 && kres.max_variation < 1e-10 &&
                         tres.max_variation > 1e-4;
              });

    criterion(8, "order expansion: residual beyond order four scales as alpha^5",
              [&](std::string& d) {
                  const SystemMasses ms(1.0, 1e-3, {1.0, 0.9});
                  const QuadratureSpec spec{64, 4096, 1e-13};
                  std::vector<Scalar> alphas{0.05, 0.1, 0.2}, residuals;
                  for (Scalar alpha : alphas) {
                      const EllipseElements inner{alpha, 0.3, Vec3::UnitX(), Vec3::UnitZ(), 0.0};
                      const Mat3 R = rot_x(0.26);
                      const EllipseElements outer{
                          1.0, 0.2, R * Vec3(std::cos(0.7), std::sin(0.7), 0.0),
                          R * Vec3::UnitZ(), 0.0};
                      Scalar r = pair_average(inner, outer, ms, 0, 1, spec);
                      for (int k = 0; k <= 4; ++k)
                          r -= pair_order_term(k, inner, outer, ms, 0, 1, spec);
                      residuals.push_back(std::abs(r));
                  }
                  const Scalar slope = oracles::loglog_slope(alphas, residuals);
                  d = fmt("slope=%.3f target 5.0+-0.5", slope, 0.0);
                  return slope > 4.5 && slope < 5.5;
              });

    criterion(9, "small-divisor sets: single-scale equivalence, measure slope, golden pair",
              [&](std::string& d) {
                  DioFiltration filt;
                  filt.nu_parts = {2};
                  filt.tau = 1.5;
                  filt.K = 12;
                  filt.gammas = VecX::Constant(1, 0.08);
                  SplitMix64 rng(9001);
                  for (int i = 0; i < 10000; ++i) {
                      VecX omega(2);
                      omega << rng.uniform(0.5, 2.5), rng.uniform(0.5, 2.5);
                      if (dio_membership(omega, filt).member !=
                          oracles::classical_diophantine(omega, 0.08, 1.5, 12))
                          return false;
                  }

                  const std::vector<std::pair<Scalar, Scalar>> box{{1.0, 2.0}, {1.0, 2.0}};
                  std::vector<Scalar> gammas{0.32, 0.16, 0.08, 0.04}, complements;
                  for (std::size_t i = 0; i < gammas.size(); ++i) {
                      DioFiltration f;
                      f.nu_parts = {2};
                      f.tau = 2.0;
                      f.K = 30;
                      f.gammas = VecX::Constant(1, gammas[i]);
                      complements.push_back(
                          1.0 - dio_measure(box, f, 20000, 9100 + i).density);
                  }
                  const Scalar slope = oracles::loglog_slope(gammas, complements);

                  VecX golden(2);
                  golden << 1.0, (1.0 + std::sqrt(5.0)) / 2.0;
                  DioFiltration gf;
                  gf.nu_parts = {2};
                  gf.tau = 1.0;
                  gf.K = 50;
                  gf.gammas = VecX::Constant(1, 0.2);
                  const bool golden_ok = dio_membership(golden, gf).member;
                  d = fmt("equivalence ok, slope=%.3f, golden member=%.0f", slope,
                          golden_ok ? 1.0 : 0.0);
                  return slope > 0.7 && slope < 1.3 && golden_ok;
              });

    criterion(10, "planar limit: chart converges linearly to the planar reduction",
              [&](std::string& d) {
                  const SystemMasses& ms = MS3;
                  const Vec3 u = rot_x(0.45) * Vec3::UnitZ();
                  const Vec3 axis = Vec3::UnitZ().cross(u).normalized();
                  const std::vector<Scalar> a{1.0, 4.5, 20.0}, e{0.35, 0.3, 0.22},
                      varpi{0.7, 2.3, 5.1}, ell{0.3, 1.7, 3.9};

                  VecX chi_oracle(3), kappa_oracle(3);
                  VecX Gamma(3);
                  for (int i = 0; i < 3; ++i)
                      Gamma[i] = ms.lambda_of_a(i, a[i]) * std::sqrt(1 - e[i] * e[i]);
                  for (int i = 0; i < 3; ++i) {
                      chi_oracle[i] = 0;
                      for (int j = i; j < 3; ++j) chi_oracle[i] += Gamma[j];
                  }
                  kappa_oracle[0] = wrap_angle(varpi[0] + PI / 2);
                  kappa_oracle[1] = wrap_angle(varpi[1] - varpi[0] + PI);
                  kappa_oracle[2] = wrap_angle(varpi[2] - varpi[1] + PI / 2);

                  std::vector<Scalar> eps_list{1e-2, 1e-4, 1e-6}, devs;
                  for (Scalar eps : eps_list) {
                      std::vector<EllipseElements> els(3);
                      for (int i = 0; i < 3; ++i) {
                          els[i].a = a[i];
                          els[i].e = e[i];
                          els[i].normal = u;
                          els[i].perihelion = rotate_about(u, axis, varpi[i]);
                          els[i].ell = ell[i];
                          const Vec3 dir = rotate_about(u, axis, 1.1 + 2.0 * i);
                          els[i].normal = rotate_about(dir, els[i].normal, eps);
                          els[i].perihelion = rotate_about(dir, els[i].perihelion, eps);
                      }
                      const PStarCoords ps = to_pstar(state_from_elements(els, ms), ms);
                      Scalar dev = 0;
                      for (int i = 0; i < 3; ++i) {
                          dev = std::max(dev,
                                         std::abs(ps.chi[i] - chi_oracle[i]) / chi_oracle[0]);
                          dev = std::max(dev, circular_distance(ps.kappa[i], kappa_oracle[i]));
                      }
                      devs.push_back(dev);
                  }
                  const Scalar slope = oracles::loglog_slope(eps_list, devs);
                  d = fmt("deviation at 1e-6 is %.2e, slope=%.2f", devs[2], slope);
                  return slope > 0.8 && devs[2] < 1e-4 && devs[1] / devs[0] < 0.1;
              });

    if (failures == 0)
        std::printf("ACCEPTANCE: all 10 criteria passed\n");
    else
        std::printf("ACCEPTANCE: %d criteria FAILED\n", failures);
    return failures;
}
