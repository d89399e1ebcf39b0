#pragma once

#include "orblab/charts.hpp"
#include "orblab/hamiltonian.hpp"
#include "orblab/masses.hpp"
#include "orblab/types.hpp"

#include <string>
#include <vector>

namespace orblab {

enum class Method { gauss6, wh2 };

struct IntegratorOptions {
    Scalar dt = 1e-2;
    Scalar t_end = 1.0;
    Method method = Method::gauss6;
    int stride = 100;          ///< store every stride-th step
    Scalar solve_tol = 1e-14;  ///< fixed-point tolerance of the implicit stages
    int max_iterations = 100;
    CollisionGuard guard;
};

struct Trajectory {
    std::vector<Scalar> times;
    std::vector<CartesianState> states;
    Method method = Method::gauss6;
    Scalar dt = 0;
    bool truncated = false;  ///< collision guard tripped before t_end
    std::string note;
};

Trajectory integrate(const CartesianState& s0, const SystemMasses& masses,
                     const IntegratorOptions& opts);

/// Diagnostics are always recomputed from the stored states.
VecX energy_series(const Trajectory& traj, const SystemMasses& masses);
Mat3X angular_momentum_series(const Trajectory& traj);

struct PStarDriftReport {
    Scalar theta0_drift = 0;    ///< max |Theta_0(t) - Theta_0(0)| / scale
    Scalar vartheta0_drift = 0; ///< max circular distance from the initial value
    Scalar chi0_drift = 0;      ///< max relative drift of |C|
    Scalar kappa0_rate = 0;     ///< fitted secular rate of the conjugate angle
    Scalar kappa0_travel = 0;   ///< total unwrapped excursion of kappa_0
    int exit_index = -1;        ///< first sample outside the chart domain
    bool partial = false;
};

/// Drift of the chart integrals along a trajectory, plus the (nonzero)
/// secular rate of the conjugate angle kappa_0 as a sensitivity control.
PStarDriftReport pstar_integral_drift(const Trajectory& traj, const SystemMasses& masses,
                                      const ChartGuards& guards = {});

} // namespace orblab
