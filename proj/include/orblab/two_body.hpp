#pragma once

#include "orblab/masses.hpp"
#include "orblab/types.hpp"

namespace orblab {

/// Osculating ellipse of one body: semi-major axis, eccentricity,
/// unit perihelion direction, unit orbital-plane normal, mean anomaly.
struct EllipseElements {
    Scalar a = 1.0;
    Scalar e = 0.0;
    Vec3 perihelion = Vec3::UnitX();  ///< P, |P| = 1
    Vec3 normal = Vec3::UnitZ();      ///< N, |N| = 1, N.P = 0
    Scalar ell = 0.0;                 ///< mean anomaly in [0, 2*pi)

    /// Angular momentum vector implied by the elements for the owning body.
    Vec3 angular_momentum(const SystemMasses& masses, int body) const;
};

/// Solve Kepler's equation E - e sin E = ell for the eccentric anomaly.
/// Newton iteration seeded at ell + e sin ell, bisection fallback.
Scalar solve_kepler(Scalar ell, Scalar e);

/// Momentum/position of one body on its ellipse at the element's mean
/// anomaly.  The momentum follows the areal law
/// y = reduced_m * sqrt(reduced_M / a^3) * d(x)/d(ell).
void elements_to_cartesian(const EllipseElements& el, const SystemMasses& masses, int body,
                           Vec3& y, Vec3& x);

/// Inverse of elements_to_cartesian for bound, non-rectilinear states.
EllipseElements cartesian_to_elements(const Vec3& y, const Vec3& x, const SystemMasses& masses,
                                      int body);

/// Sum of the integrated two-body energies, -sum reduced_m^3 reduced_M^2 / (2 Lambda^2).
Scalar keplerian_energy(const VecX& lambda, const SystemMasses& masses);

/// Two-body energy |y|^2/(2 reduced_m) - reduced_m*reduced_M/|x| of one body.
Scalar two_body_energy(const Vec3& y, const Vec3& x, const SystemMasses& masses, int body);

} // namespace orblab
