#include "orblab/hamiltonian.hpp"

#include <string>

namespace orblab {

namespace {

void check_distances(const CartesianState& state, const CollisionGuard& guard) {
    const int n = state.count();
    for (int i = 0; i < n; ++i) {
        if (state.x.col(i).norm() < guard.delta)
            throw singularity_error("collision: body " + std::to_string(i) + " at the star");
        for (int j = i + 1; j < n; ++j)
            if ((state.x.col(i) - state.x.col(j)).norm() < guard.delta)
                throw singularity_error("collision: bodies " + std::to_string(i) + " and " +
                                        std::to_string(j));
    }
}

} // namespace

HamiltonianValue evaluate(const CartesianState& state, const SystemMasses& masses,
                          const CollisionGuard& guard) {
    check_distances(state, guard);
    const int n = state.count();
    HamiltonianValue v;
    for (int i = 0; i < n; ++i) {
        const Scalar rm = masses.reduced_m(i);
        const Scalar rM = masses.reduced_M(i);
        v.keplerian += state.y.col(i).squaredNorm() / (2 * rm) - rm * rM / state.x.col(i).norm();
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            v.indirect += state.y.col(i).dot(state.y.col(j)) / masses.m0;
            v.direct -= masses.m[i] * masses.m[j] / (state.x.col(i) - state.x.col(j)).norm();
        }
    v.total = v.keplerian + masses.mu * (v.direct + v.indirect);
    return v;
}

void gradient(const CartesianState& state, const SystemMasses& masses, Mat3X& dH_dy, Mat3X& dH_dx,
              const CollisionGuard& guard) {
    check_distances(state, guard);
    const int n = state.count();
    dH_dy.resize(3, n);
    dH_dx.resize(3, n);
    for (int i = 0; i < n; ++i) {
        const Scalar rm = masses.reduced_m(i);
        const Scalar rM = masses.reduced_M(i);
        const Scalar r = state.x.col(i).norm();
        dH_dy.col(i) = state.y.col(i) / rm;
        dH_dx.col(i) = rm * rM * state.x.col(i) / (r * r * r);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            dH_dy.col(i) += masses.mu * state.y.col(j) / masses.m0;
            dH_dy.col(j) += masses.mu * state.y.col(i) / masses.m0;
            const Vec3 d = state.x.col(i) - state.x.col(j);
            const Scalar r3 = std::pow(d.norm(), 3);
            const Vec3 f = masses.mu * masses.m[i] * masses.m[j] * d / r3;
            dH_dx.col(i) += f;
            dH_dx.col(j) -= f;
        }
}

CartesianState state_from_elements(const std::vector<EllipseElements>& els,
                                   const SystemMasses& masses) {
    CartesianState s(static_cast<int>(els.size()));
    for (std::size_t i = 0; i < els.size(); ++i) {
        Vec3 y, x;
        elements_to_cartesian(els[i], masses, static_cast<int>(i), y, x);
        s.y.col(static_cast<Eigen::Index>(i)) = y;
        s.x.col(static_cast<Eigen::Index>(i)) = x;
    }
    return s;
}

} // namespace orblab
