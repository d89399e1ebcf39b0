#include "doctest.h"
#include "oracles.hpp"

#include "orblab/secular.hpp"

#include <limits>

using namespace orblab;

namespace {

const SystemMasses MS2(1.0, 1e-3, {1.0, 0.9});

// light outer planet for the portrait runs
const SystemMasses MSP(1.0, 1e-3, {1.0, 0.14});

EllipseElements make_el(Scalar a, Scalar e, const Vec3& P, const Vec3& N, Scalar ell) {
    return EllipseElements{a, e, P, N, ell};
}

/// base point for the two-planet quadrupole portrait: the inner
/// eccentricity stays moderate over the window Theta in [-0.2, 0.2],
/// vartheta within 0.6 of pi
PStarCoords portrait_base(const SystemMasses& ms) {
    PStarCoords ps;
    ps.Lambda.resize(2);
    ps.chi.resize(2);
    ps.Theta.resize(2);
    ps.ell.resize(2);
    ps.kappa.resize(2);
    ps.vartheta.resize(2);
    ps.Lambda[0] = ms.lambda_of_a(0, 1.0);
    ps.Lambda[1] = ms.lambda_of_a(1, 5.0);
    ps.chi[1] = std::sqrt(1.0 - 0.45 * 0.45) * ps.Lambda[1];  // outer e = 0.45
    ps.chi[0] = 1.15;
    ps.Theta[0] = 0.2 * ps.chi[0];
    ps.Theta[1] = 0.0;
    ps.ell << 0.0, 0.0;
    ps.kappa << 1.1, 2.3;
    ps.vartheta << 0.7, PI;
    return ps;
}

} // namespace

TEST_CASE("orbit averages: the classical identities") {
    const SystemMasses ms(1.0, 1e-3, {1.0});
    SplitMix64 rng(51);
    const QuadratureSpec spec{32, 2048, 1e-12};
    Scalar worst = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const EllipseElements el = oracles::random_elements(rng, 0.4, 4.0, 0.0, 0.9);
        const OrbitAverages av = orbit_averages(el, ms, 0, spec);
        worst = std::max(worst, std::abs(av.inv_r - 1.0 / el.a) * el.a);
        worst = std::max(worst, av.y.norm());
        worst = std::max(worst, av.x_over_r3.norm() * el.a * el.a);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("secular average: indirect part has zero mean") {
    SplitMix64 rng(52);
    const QuadratureSpec spec{32, 2048, 1e-12};
    Scalar worst = 0;
    for (int rep = 0; rep < 10; ++rep) {
        const auto els = oracles::random_system_elements(rng, 2, 0.1, 0.5, 0.4);
        worst = std::max(worst,
                         std::abs(indirect_pair_average(els[0], els[1], MS2, 0, 1, spec)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("secular orders: k = 0 and k = 1 are the classical values") {
    SplitMix64 rng(53);
    const QuadratureSpec spec{32, 2048, 1e-12};
    for (int rep = 0; rep < 5; ++rep) {
        const auto els = oracles::random_system_elements(rng, 2, 0.1, 0.5, 0.4, 0.15, 0.3);
        const Scalar k0 = pair_order_term(0, els[0], els[1], MS2, 0, 1, spec);
        CHECK(k0 == doctest::Approx(-MS2.m[0] * MS2.m[1] / els[1].a).epsilon(1e-11));
        const Scalar k1 = pair_order_term(1, els[0], els[1], MS2, 0, 1, spec);
        CHECK(std::abs(k1) < 1e-11);
    }
}

TEST_CASE("secular orders: quadrupole of the coplanar circular pair") {
    // frozen value derived from the averaged Legendre kernel:
    // -(m1 m2 / a2) * alpha^2 / 4
    const Scalar alpha = 0.2, a2 = 5.0;
    const QuadratureSpec spec{32, 2048, 1e-12};
    const EllipseElements inner = make_el(alpha * a2, 0.0, Vec3::UnitX(), Vec3::UnitZ(), 0.0);
    const EllipseElements outer = make_el(a2, 0.0, Vec3::UnitY(), Vec3::UnitZ(), 0.0);
    const Scalar k2 = pair_order_term(2, inner, outer, MS2, 0, 1, spec);
    const Scalar expected = -MS2.m[0] * MS2.m[1] / a2 * alpha * alpha / 4;
    CHECK(k2 == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("secular orders: ratio precondition") {
    const EllipseElements inner = make_el(1.0, 0.1, Vec3::UnitX(), Vec3::UnitZ(), 0.0);
    const EllipseElements outer = make_el(1.8, 0.1, Vec3::UnitY(), Vec3::UnitZ(), 0.0);
    CHECK_THROWS_AS(pair_order_term(2, inner, outer, MS2, 0, 1, {}), std::domain_error);
}

TEST_CASE("quadrature: doubling acceptance and failure report") {
    const QuadratureSpec tight{32, 64, 1e-15};
    // an integrand whose trapezoid values keep moving at these node counts
    try {
        periodic_average([](Scalar t) { return 1.0 / (1.05 - std::cos(t)); }, tight);
        FAIL("expected accuracy_error");
    } catch (const accuracy_error& err) {
        CHECK(err.achieved_tol == 1e-15);
        CHECK(std::isfinite(err.estimate));
    }
    // the same integrand converges once the cap is lifted
    const QuadratureSpec wide{32, 4096, 1e-13};
    const Scalar value =
        periodic_average([](Scalar t) { return 1.0 / (1.05 - std::cos(t)); }, wide);
    // closed form: 1/sqrt(1.05^2 - 1)
    CHECK(value == doctest::Approx(1.0 / std::sqrt(1.05 * 1.05 - 1.0)).epsilon(1e-12));
}

TEST_CASE("secular average: touching and crossing orbits are rejected") {
    // coincident tori trip the coarse distance scan
    const EllipseElements el = make_el(1.0, 0.4, Vec3::UnitX(), Vec3::UnitZ(), 0.0);
    CHECK_THROWS_AS(pair_average(el, el, MS2, 0, 1, {}), singularity_error);

    // transversally crossing tori defeat the quadrature instead
    const EllipseElements inner = make_el(1.0, 0.6, Vec3::UnitX(), Vec3::UnitZ(), 0.0);
    const EllipseElements outer = make_el(1.1, 0.4, Vec3::UnitX(), Vec3::UnitZ(), 0.0);
    CHECK_THROWS_AS(pair_average(inner, outer, MS2, 0, 1, {}), accuracy_error);
}

TEST_CASE("secular average: bilinear in the planet mass factors") {
    SplitMix64 rng(54);
    const auto els = oracles::random_system_elements(rng, 2, 0.1, 0.4, 0.4);
    const QuadratureSpec spec{32, 1024, 1e-11};
    const Scalar base = pair_average(els[0], els[1], MS2, 0, 1, spec);
    SystemMasses scaled = MS2;
    scaled.m[0] *= 3.0;
    scaled.m[1] *= 0.5;
    const Scalar value = pair_average(els[0], els[1], scaled, 0, 1, spec);
    CHECK(value == doctest::Approx(base * 1.5).epsilon(1e-9));
}

TEST_CASE("order expansion: residual beyond k = 4 scales as the fifth power") {
    const QuadratureSpec spec{64, 4096, 1e-13};
    const Scalar a2 = 1.0;
    std::vector<Scalar> alphas{0.05, 0.1, 0.2};
    std::vector<Scalar> residuals;
    for (Scalar alpha : alphas) {
        const EllipseElements inner =
            make_el(alpha * a2, 0.3, Vec3::UnitX(), Vec3::UnitZ(), 0.0);
        Mat3 tilt;
        const Scalar im = 0.26;
        tilt << 1, 0, 0, 0, std::cos(im), -std::sin(im), 0, std::sin(im), std::cos(im);
        const Vec3 N2 = tilt * Vec3::UnitZ();
        const Vec3 P2 = tilt * Vec3(std::cos(0.7), std::sin(0.7), 0.0);
        const EllipseElements outer = make_el(a2, 0.2, P2, N2, 0.0);
        Scalar full = pair_average(inner, outer, MS2, 0, 1, spec);
        for (int k = 0; k <= 4; ++k) full -= pair_order_term(k, inner, outer, MS2, 0, 1, spec);
        residuals.push_back(std::abs(full));
    }
    const Scalar slope = oracles::loglog_slope(alphas, residuals);
    CHECK(slope > 4.5);
    CHECK(slope < 5.5);
}

TEST_CASE("dependence probe: quadrupole term ignores the last node angle") {
    const SystemMasses& ms = MSP;
    const PStarCoords base = portrait_base(ms);
    SecularTerm term;
    term.i = 0;
    term.j = 1;
    term.order = 2;
    term.quadrature = QuadratureSpec{32, 2048, 1e-12};

    VecX grid(32);
    for (int i = 0; i < 32; ++i) grid[i] = TWO_PI * i / 32;
    const DependenceProbeResult res =
        dependence_probe(term, base, ms, PStarBlock::kappa, 1, grid);
    CHECK(res.evaluated == 32);
    CHECK(res.max_variation < 1e-10);

    // positive control: the conjugate angle vartheta_1 moves the term
    const DependenceProbeResult pos =
        dependence_probe(term, base, ms, PStarBlock::vartheta, 1, grid);
    CHECK(pos.max_variation > 1e-4);
}

TEST_CASE("dependence probe: inner-pair average ignores kappa_2 in a three-planet chain") {
    const SystemMasses ms(1.0, 1e-3, {1.0, 0.9, 1.2});
    SplitMix64 rng(55);
    // build a generic spatial 3-planet state inside the chart domain
    CartesianState st = state_from_elements(
        oracles::random_system_elements(rng, 3, 0.2, 0.4, 0.3, 0.18, 0.25), ms);
    Mat3 R;
    const Scalar t = 0.5;
    R << 1, 0, 0, 0, std::cos(t), -std::sin(t), 0, std::sin(t), std::cos(t);
    CartesianState tilted(3);
    tilted.y = R * st.y;
    tilted.x = R * st.x;
    const PStarCoords base = to_pstar(tilted, ms);

    SecularTerm term;
    term.i = 0;
    term.j = 1;
    term.order.reset();  // full average
    term.quadrature = QuadratureSpec{32, 2048, 1e-12};

    VecX grid(16);
    for (int i = 0; i < 16; ++i) grid[i] = TWO_PI * i / 16;
    const DependenceProbeResult res =
        dependence_probe(term, base, ms, PStarBlock::kappa, 2, grid);
    CHECK(res.evaluated == 16);
    CHECK(res.max_variation < 1e-10);

    // positive control on an included coordinate; the excursion is kept
    // small because vartheta_1 moves |C_1| with a large lever arm
    VecX tgrid = VecX::LinSpaced(8, base.vartheta[1] - 2e-3, base.vartheta[1] + 2e-3);
    const DependenceProbeResult pos =
        dependence_probe(term, base, ms, PStarBlock::vartheta, 1, tgrid);
    CHECK(pos.evaluated == 8);
    CHECK(pos.max_variation > 1e-7);
}

TEST_CASE("phase portrait: equilibrium, symmetry and closed level curves") {
    const SystemMasses& ms = MSP;
    const PStarCoords base = portrait_base(ms);
    const QuadratureSpec spec{32, 2048, 1e-11};

    SecularTerm term;
    term.i = 0;
    term.j = 1;
    term.order = 2;
    term.quadrature = spec;

    // critical point of the reduced pair term at (Theta, vartheta) = (0, pi)
    {
        PStarCoords at = base;
        at.Theta[1] = 0.0;
        at.vartheta[1] = PI;
        const Scalar delta = 1e-4;
        PStarCoords pp = at, pm = at;
        pp.Theta[1] += delta;
        pm.Theta[1] -= delta;
        const Scalar gT =
            (term.eval_pstar(pp, ms) - term.eval_pstar(pm, ms)) / (2 * delta);
        pp = at;
        pm = at;
        pp.vartheta[1] += delta;
        pm.vartheta[1] -= delta;
        const Scalar gV =
            (term.eval_pstar(pp, ms) - term.eval_pstar(pm, ms)) / (2 * delta);
        CHECK(std::abs(gT) < 1e-7);
        CHECK(std::abs(gV) < 1e-7);
    }

    // window around the planar point where the chart stays valid and all
    // eccentricities remain moderate
    const int N = 64;
    VecX tg = VecX::LinSpaced(N, -0.2, 0.2);
    VecX vg = VecX::LinSpaced(N, PI - 0.6, PI + 0.6);
    const PhasePortrait pp = quadrupole_phase_portrait(base, ms, tg, vg, spec);
    CHECK(!pp.values.hasNaN());

    // reflection symmetry (Theta, vartheta) -> (-Theta, -vartheta)
    Scalar sym = 0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            sym = std::max(sym, std::abs(pp.values(a, b) - pp.values(N - 1 - a, N - 1 - b)));
    CHECK(sym < 1e-9);

    // closed level curves around the planar equilibrium: pick a level
    // between the center value and the nearest boundary value
    const Scalar center = pp.values((N - 1) / 2, (N - 1) / 2);
    Scalar boundary_min = std::numeric_limits<Scalar>::max();
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            if (a == 0 || b == 0 || a == N - 1 || b == N - 1)
                boundary_min = std::min(boundary_min, pp.values(a, b));
    CHECK(boundary_min > center);
    const Scalar level = center + 0.25 * (boundary_min - center);
    const oracles::ContourCensus census = oracles::contour_census(pp.values, level);
    CHECK(census.interior_crossings > 0);
    CHECK(census.boundary_crossings == 0);
}

TEST_CASE("poincare secular evaluator: parities, rotation symmetry, equilibrium") {
    const SystemMasses ms(1.0, 1e-3, {1.0, 0.9});
    VecX Lambda(2);
    Lambda << ms.lambda_of_a(0, 1.0), ms.lambda_of_a(1, 6.0);
    const PoincareSecular f(Lambda, ms, QuadratureSpec{64, 2048, 1e-12});

    SplitMix64 rng(56);
    std::vector<VecX> samples;
    for (int i = 0; i < 12; ++i) {
        VecX z(8);
        for (int c = 0; c < 8; ++c)
            z[c] = 0.12 * std::sqrt(Lambda[c % 2]) * rng.uniform(-1, 1);
        samples.push_back(z);
    }
    std::vector<Scalar> angles{0.4, 1.9, 3.7};
    const ParityReport rep = dalembert_parity_test(f, 2, samples, angles, 1e-4);
    CHECK(rep.defect_flip_xi_p < 1e-9);
    CHECK(rep.defect_flip_eta_q < 1e-9);
    CHECK(rep.defect_flip_p_q < 1e-9);
    CHECK(rep.rotation_defect < 1e-9);
    CHECK(rep.gradient_norm_at_0 < 1e-8);
}
