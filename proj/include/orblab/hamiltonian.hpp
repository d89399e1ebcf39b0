#pragma once

#include "orblab/masses.hpp"
#include "orblab/two_body.hpp"
#include "orblab/types.hpp"

#include <vector>

namespace orblab {

/// Heliocentric phase-space point: one momentum and one position
/// column per planet.
struct CartesianState {
    Mat3X y;  ///< conjugate momenta, 3 x n
    Mat3X x;  ///< heliocentric positions, 3 x n

    CartesianState() = default;
    explicit CartesianState(int n) : y(3, n), x(3, n) {
        y.setZero();
        x.setZero();
    }
    int count() const { return static_cast<int>(x.cols()); }

    /// Total angular momentum sum x_i cross y_i.
    Vec3 total_angular_momentum() const {
        Vec3 c = Vec3::Zero();
        for (int i = 0; i < count(); ++i) c += x.col(i).cross(y.col(i));
        return c;
    }
};

/// Value of the heliocentric Hamiltonian split into its pieces,
/// total = keplerian + mu * (direct + indirect).
struct HamiltonianValue {
    Scalar total = 0;
    Scalar keplerian = 0;
    Scalar direct = 0;    ///< -sum_{i<j} m_i m_j / |x_i - x_j|
    Scalar indirect = 0;  ///< sum_{i<j} y_i . y_j / m0
};

/// Collision guard: smallest allowed heliocentric or mutual distance.
struct CollisionGuard {
    Scalar delta = 1e-8;
};

HamiltonianValue evaluate(const CartesianState& state, const SystemMasses& masses,
                          const CollisionGuard& guard = {});

/// Analytic gradient (dH/dy, dH/dx), both 3 x n.
void gradient(const CartesianState& state, const SystemMasses& masses, Mat3X& dH_dy,
              Mat3X& dH_dx, const CollisionGuard& guard = {});

/// Build a state from per-body elements.
CartesianState state_from_elements(const std::vector<EllipseElements>& els,
                                   const SystemMasses& masses);

} // namespace orblab
