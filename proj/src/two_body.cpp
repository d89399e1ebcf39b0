#include "orblab/two_body.hpp"

#include <cmath>

namespace orblab {

namespace {
const int NEWTON_MAX_ITER = 50;
const Scalar KEPLER_TOL = 1e-14;
} // namespace

Scalar solve_kepler(Scalar ell, Scalar e) {
    if (!(e >= 0.0 && e < 1.0))
        throw std::domain_error("solve_kepler: eccentricity must lie in [0,1)");
    ell = wrap_angle(ell);
    Scalar E = ell + e * std::sin(ell);
    for (int it = 0; it < NEWTON_MAX_ITER; ++it) {
        const Scalar f = E - e * std::sin(E) - ell;
        if (std::abs(f) < KEPLER_TOL) return wrap_angle(E);
        const Scalar fp = 1.0 - e * std::cos(E);
        E -= f / fp;
    }
    // Newton stalled (possible very close to e = 1); bisect on [0, 2*pi].
    Scalar lo = 0.0, hi = TWO_PI;
    auto g = [&](Scalar u) { return u - e * std::sin(u) - ell; };
    for (int it = 0; it < 200; ++it) {
        const Scalar mid = 0.5 * (lo + hi);
        if (g(mid) > 0)
            hi = mid;
        else
            lo = mid;
    }
    return wrap_angle(0.5 * (lo + hi));
}

Vec3 EllipseElements::angular_momentum(const SystemMasses& masses, int body) const {
    const Scalar lambda = masses.lambda_of_a(body, a);
    return lambda * std::sqrt(1.0 - e * e) * normal;
}

void elements_to_cartesian(const EllipseElements& el, const SystemMasses& masses, int body,
                           Vec3& y, Vec3& x) {
    const Scalar E = solve_kepler(el.ell, el.e);
    const Scalar cE = std::cos(E), sE = std::sin(E);
    const Scalar se = std::sqrt(1.0 - el.e * el.e);
    const Vec3 Q = el.normal.cross(el.perihelion);

    x = el.a * ((cE - el.e) * el.perihelion + se * sE * Q);

    // y = m sqrt(M/a^3) d(x)/d(ell), with d(E)/d(ell) = 1/(1 - e cos E)
    const Scalar rm = masses.reduced_m(body);
    const Scalar rM = masses.reduced_M(body);
    const Scalar factor = rm * std::sqrt(rM / el.a) / (1.0 - el.e * cE);
    y = factor * (-sE * el.perihelion + se * cE * Q);
}

EllipseElements cartesian_to_elements(const Vec3& y, const Vec3& x, const SystemMasses& masses,
                                      int body) {
    const Scalar rm = masses.reduced_m(body);
    const Scalar rM = masses.reduced_M(body);
    const Scalar r = x.norm();
    if (!(r > 0)) throw std::domain_error("cartesian_to_elements: position at the origin");

    const Vec3 C = x.cross(y);
    const Scalar Cn = C.norm();
    if (!(Cn > 0)) throw std::domain_error("cartesian_to_elements: rectilinear orbit");

    const Scalar energy = y.squaredNorm() / (2 * rm) - rm * rM / r;
    if (!(energy < 0)) throw std::domain_error("cartesian_to_elements: orbit is not bound");

    EllipseElements el;
    el.a = -rm * rM / (2 * energy);
    el.normal = C / Cn;

    // Laplace-Runge-Lenz vector: its norm gives the eccentricity without
    // the cancellation that 1 - (|C|/Lambda)^2 suffers near circularity.
    // For (near-)circular orbits any in-plane perihelion serves; the
    // natural continuous pick is the current position.
    const Vec3 evec = y.cross(C) / (rm * rm * rM) - x / r;
    el.e = std::min(evec.norm(), 1.0 - 1e-15);
    if (evec.norm() > 1e-12) {
        el.perihelion = evec.normalized();
    } else {
        el.perihelion = (x - el.normal * el.normal.dot(x)).normalized();
    }

    const Vec3 Q = el.normal.cross(el.perihelion);
    const Scalar se = std::sqrt(std::max(1e-300, 1.0 - el.e * el.e));
    const Scalar cosE = x.dot(el.perihelion) / el.a + el.e;
    const Scalar sinE = x.dot(Q) / (el.a * se);
    const Scalar E = std::atan2(sinE, cosE);
    el.ell = wrap_angle(E - el.e * std::sin(E));
    return el;
}

Scalar keplerian_energy(const VecX& lambda, const SystemMasses& masses) {
    Scalar h = 0;
    for (int i = 0; i < lambda.size(); ++i) {
        const Scalar rm = masses.reduced_m(i);
        const Scalar rM = masses.reduced_M(i);
        h -= rm * rm * rm * rM * rM / (2 * lambda[i] * lambda[i]);
    }
    return h;
}

Scalar two_body_energy(const Vec3& y, const Vec3& x, const SystemMasses& masses, int body) {
    const Scalar rm = masses.reduced_m(body);
    const Scalar rM = masses.reduced_M(body);
    return y.squaredNorm() / (2 * rm) - rm * rM / x.norm();
}

} // namespace orblab
