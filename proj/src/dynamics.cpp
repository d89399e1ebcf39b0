#include "orblab/dynamics.hpp"

#include "orblab/two_body.hpp"

#include <cmath>

namespace orblab {

namespace {

// 3-stage Gauss-Legendre collocation, order 6
const Scalar SQ15 = std::sqrt(15.0);
const Scalar GA[3][3] = {
    {5.0 / 36.0, 2.0 / 9.0 - SQ15 / 15.0, 5.0 / 36.0 - SQ15 / 30.0},
    {5.0 / 36.0 + SQ15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - SQ15 / 24.0},
    {5.0 / 36.0 + SQ15 / 30.0, 2.0 / 9.0 + SQ15 / 15.0, 5.0 / 36.0}};
const Scalar GB[3] = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};

struct Deriv {
    Mat3X dy;  ///< time derivative of y
    Mat3X dx;  ///< time derivative of x
};

Deriv vector_field(const CartesianState& s, const SystemMasses& masses,
                   const CollisionGuard& guard) {
    Mat3X dH_dy, dH_dx;
    gradient(s, masses, dH_dy, dH_dx, guard);
    return Deriv{-dH_dx, dH_dy};
}

bool gauss6_step(CartesianState& s, const SystemMasses& masses, const IntegratorOptions& opts,
                 std::vector<Deriv>& stages) {
    const Scalar h = opts.dt;
    const int n = s.count();
    if (stages.size() != 3) {
        const Deriv d0 = vector_field(s, masses, opts.guard);
        stages.assign(3, d0);
    }
    const Scalar scale = std::max({1.0, s.y.cwiseAbs().maxCoeff(), s.x.cwiseAbs().maxCoeff()});
    bool converged = false;
    for (int it = 0; it < opts.max_iterations; ++it) {
        Scalar delta = 0;
        std::vector<Deriv> next(3);
        for (int a = 0; a < 3; ++a) {
            CartesianState sa(n);
            sa.y = s.y;
            sa.x = s.x;
            for (int b = 0; b < 3; ++b) {
                sa.y += h * GA[a][b] * stages[b].dy;
                sa.x += h * GA[a][b] * stages[b].dx;
            }
            next[a] = vector_field(sa, masses, opts.guard);
            delta = std::max(delta, (next[a].dy - stages[a].dy).cwiseAbs().maxCoeff());
            delta = std::max(delta, (next[a].dx - stages[a].dx).cwiseAbs().maxCoeff());
        }
        stages = std::move(next);
        if (delta < opts.solve_tol * scale) {
            converged = true;
            break;
        }
    }
    if (!converged) return false;
    for (int a = 0; a < 3; ++a) {
        s.y += h * GB[a] * stages[a].dy;
        s.x += h * GB[a] * stages[a].dx;
    }
    return true;
}

// Kepler flow of every body over time h, via the difference form of
// Kepler's equation (exact for the unperturbed part).
void kepler_flow(CartesianState& s, const SystemMasses& masses, Scalar h) {
    for (int i = 0; i < s.count(); ++i) {
        EllipseElements el = cartesian_to_elements(s.y.col(i), s.x.col(i), masses, i);
        const Scalar mean_motion = std::sqrt(masses.reduced_M(i) / std::pow(el.a, 3));
        el.ell = wrap_angle(el.ell + mean_motion * h);
        Vec3 y, x;
        elements_to_cartesian(el, masses, i, y, x);
        s.y.col(i) = y;
        s.x.col(i) = x;
    }
}

void wh2_step(CartesianState& s, const SystemMasses& masses, const IntegratorOptions& opts) {
    const Scalar h = opts.dt;
    const int n = s.count();
    auto direct_kick = [&](Scalar tau) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const Vec3 d = s.x.col(i) - s.x.col(j);
                const Scalar r3 = std::pow(d.norm(), 3);
                const Vec3 f = masses.mu * masses.m[i] * masses.m[j] * d / r3;
                s.y.col(i) -= tau * f;
                s.y.col(j) += tau * f;
            }
    };
    auto indirect_drift = [&](Scalar tau) {
        Vec3 ysum = Vec3::Zero();
        for (int i = 0; i < n; ++i) ysum += s.y.col(i);
        for (int i = 0; i < n; ++i)
            s.x.col(i) += tau * masses.mu * (ysum - Vec3(s.y.col(i))) / masses.m0;
    };
    direct_kick(h / 2);
    indirect_drift(h / 2);
    kepler_flow(s, masses, h);
    indirect_drift(h / 2);
    direct_kick(h / 2);
}

bool collision_close(const CartesianState& s, const CollisionGuard& guard) {
    for (int i = 0; i < s.count(); ++i) {
        if (s.x.col(i).norm() < guard.delta) return true;
        for (int j = i + 1; j < s.count(); ++j)
            if ((s.x.col(i) - s.x.col(j)).norm() < guard.delta) return true;
    }
    return false;
}

} // namespace

Trajectory integrate(const CartesianState& s0, const SystemMasses& masses,
                     const IntegratorOptions& opts) {
    if (!(opts.dt != 0)) throw std::domain_error("integrate: dt must be nonzero");
    Trajectory traj;
    traj.method = opts.method;
    traj.dt = opts.dt;

    CartesianState s = s0;
    Scalar t = 0;
    traj.times.push_back(t);
    traj.states.push_back(s);

    const long steps = static_cast<long>(std::llround(opts.t_end / opts.dt));
    if (steps < 0)
        throw std::domain_error("integrate: sign of dt inconsistent with t_end");
    std::vector<Deriv> stages;
    for (long step = 1; step <= steps; ++step) {
        try {
            if (opts.method == Method::gauss6) {
                if (!gauss6_step(s, masses, opts, stages))
                    throw std::runtime_error(
                        "integrate: implicit stage solve did not converge at t = " +
                        std::to_string(t));
            } else {
                wh2_step(s, masses, opts);
            }
        } catch (const singularity_error& err) {
            traj.truncated = true;
            traj.note = std::string("collision guard: ") + err.what();
            break;
        }
        t = step * opts.dt;
        if (collision_close(s, opts.guard)) {
            traj.truncated = true;
            traj.note = "collision guard tripped at t = " + std::to_string(t);
            break;
        }
        if (step % opts.stride == 0 || step == steps) {
            traj.times.push_back(t);
            traj.states.push_back(s);
        }
    }
    return traj;
}

VecX energy_series(const Trajectory& traj, const SystemMasses& masses) {
    VecX e(traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        e[static_cast<Eigen::Index>(i)] = evaluate(traj.states[i], masses).total;
    return e;
}

Mat3X angular_momentum_series(const Trajectory& traj) {
    Mat3X c(3, traj.states.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        c.col(static_cast<Eigen::Index>(i)) = traj.states[i].total_angular_momentum();
    return c;
}

PStarDriftReport pstar_integral_drift(const Trajectory& traj, const SystemMasses& masses,
                                      const ChartGuards& guards) {
    PStarDriftReport rep;
    if (traj.states.empty()) return rep;

    std::vector<Scalar> kappa0_unwrapped;
    Scalar theta0_0 = 0, vartheta0_0 = 0, chi0_0 = 0;
    bool first = true;
    Scalar prev_kappa = 0;
    Scalar offset = 0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        PStarCoords ps;
        try {
            ps = to_pstar(traj.states[i], masses, guards);
        } catch (const chart_error&) {
            rep.exit_index = static_cast<int>(i);
            rep.partial = true;
            break;
        }
        if (first) {
            theta0_0 = ps.Theta[0];
            vartheta0_0 = ps.vartheta[0];
            chi0_0 = ps.chi[0];
            prev_kappa = ps.kappa[0];
            first = false;
        }
        const Scalar scale = std::max(std::abs(chi0_0), 1e-300);
        rep.theta0_drift = std::max(rep.theta0_drift, std::abs(ps.Theta[0] - theta0_0) / scale);
        rep.vartheta0_drift =
            std::max(rep.vartheta0_drift, circular_distance(ps.vartheta[0], vartheta0_0));
        rep.chi0_drift = std::max(rep.chi0_drift, std::abs(ps.chi[0] - chi0_0) / scale);

        // unwrap kappa_0 assuming less than half a turn between samples
        Scalar dk = ps.kappa[0] - prev_kappa;
        if (dk > PI) offset -= TWO_PI;
        if (dk < -PI) offset += TWO_PI;
        kappa0_unwrapped.push_back(ps.kappa[0] + offset);
        prev_kappa = ps.kappa[0];
    }

    // least-squares slope of kappa_0 against time
    const std::size_t m = kappa0_unwrapped.size();
    if (m >= 2) {
        Scalar st = 0, sk = 0, stt = 0, stk = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const Scalar t = traj.times[i];
            st += t;
            sk += kappa0_unwrapped[i];
            stt += t * t;
            stk += t * kappa0_unwrapped[i];
        }
        const Scalar denom = m * stt - st * st;
        if (denom > 0) rep.kappa0_rate = (m * stk - st * sk) / denom;
        rep.kappa0_travel = std::abs(kappa0_unwrapped.back() - kappa0_unwrapped.front());
    }
    return rep;
}

} // namespace orblab
