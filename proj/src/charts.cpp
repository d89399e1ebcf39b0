#include "orblab/charts.hpp"

#include <cmath>
#include <string>

namespace orblab {

namespace {

const Vec3 AXIS_I = Vec3::UnitX();
const Vec3 AXIS_K = Vec3::UnitZ();

Scalar clamp1(Scalar v) { return std::min(1.0, std::max(-1.0, v)); }

std::vector<EllipseElements> body_elements(const CartesianState& state,
                                           const SystemMasses& masses) {
    std::vector<EllipseElements> els(state.count());
    for (int i = 0; i < state.count(); ++i)
        els[i] = cartesian_to_elements(state.y.col(i), state.x.col(i), masses, i);
    return els;
}

} // namespace

// --- Delaunay ---------------------------------------------------------------

DelaunayCoords to_delaunay(const CartesianState& state, const SystemMasses& masses,
                           const ChartGuards& guards) {
    const int n = state.count();
    DelaunayCoords dc;
    dc.Lambda.resize(n);
    dc.Gamma.resize(n);
    dc.H.resize(n);
    dc.ell.resize(n);
    dc.g.resize(n);
    dc.h.resize(n);
    for (int i = 0; i < n; ++i) {
        const EllipseElements el = cartesian_to_elements(state.y.col(i), state.x.col(i), masses, i);
        if (el.e <= guards.e_min)
            throw chart_error("delaunay: eccentricity of body " + std::to_string(i) +
                              " inside the circular singularity guard");
        const Vec3 C = state.x.col(i).cross(state.y.col(i));
        const Vec3 N = el.normal;
        const Scalar sin_i = std::hypot(N.x(), N.y());
        if (sin_i <= guards.i_min)
            throw chart_error("delaunay: inclination of body " + std::to_string(i) +
                              " inside the equatorial singularity guard");
        dc.Lambda[i] = masses.lambda_of_a(i, el.a);
        dc.Gamma[i] = C.norm();
        dc.H[i] = C.z();
        dc.ell[i] = el.ell;
        // ascending node k x N, then argument of perihelion around N
        const Vec3 node(-N.y(), N.x(), 0.0);
        dc.h[i] = wrap_angle(std::atan2(node.y(), node.x()));
        dc.g[i] = oriented_angle(N, node, el.perihelion);
    }
    return dc;
}

CartesianState from_delaunay(const DelaunayCoords& dc, const SystemMasses& masses) {
    const int n = dc.count();
    std::vector<EllipseElements> els(n);
    for (int i = 0; i < n; ++i) {
        if (!(dc.Lambda[i] > 0 && dc.Gamma[i] > 0))
            throw chart_error("delaunay: nonpositive action for body " + std::to_string(i));
        if (dc.Gamma[i] > dc.Lambda[i] * (1 + 1e-12) || std::abs(dc.H[i]) > dc.Gamma[i] * (1 + 1e-12))
            throw chart_error("delaunay: action ordering violated for body " + std::to_string(i));
        EllipseElements el;
        el.a = masses.a_of_lambda(i, dc.Lambda[i]);
        el.e = std::sqrt(std::max(0.0, 1.0 - (dc.Gamma[i] / dc.Lambda[i]) * (dc.Gamma[i] / dc.Lambda[i])));
        const Scalar cos_i = clamp1(dc.H[i] / dc.Gamma[i]);
        const Scalar sin_i = std::sqrt(1.0 - cos_i * cos_i);
        const Vec3 node(std::cos(dc.h[i]), std::sin(dc.h[i]), 0.0);
        el.normal = Vec3(sin_i * std::sin(dc.h[i]), -sin_i * std::cos(dc.h[i]), cos_i);
        el.perihelion = rotate_about(el.normal, node, dc.g[i]);
        el.ell = dc.ell[i];
        els[i] = el;
    }
    return state_from_elements(els, masses);
}

// --- Poincare ---------------------------------------------------------------

PoincareCoords to_poincare(const CartesianState& state, const SystemMasses& masses,
                           const ChartGuards& guards) {
    (void)guards;
    const int n = state.count();
    PoincareCoords pc;
    pc.Lambda.resize(n);
    pc.lambda.resize(n);
    pc.eta.resize(n);
    pc.xi.resize(n);
    pc.p.resize(n);
    pc.q.resize(n);
    for (int i = 0; i < n; ++i) {
        const EllipseElements el = cartesian_to_elements(state.y.col(i), state.x.col(i), masses, i);
        const Vec3 C = state.x.col(i).cross(state.y.col(i));
        const Vec3 N = el.normal;
        if (!(N.z() > 0))
            throw chart_error("poincare: orbit of body " + std::to_string(i) +
                              " is not prograde (inclination >= pi/2)");
        const Scalar Lambda = masses.lambda_of_a(i, el.a);
        const Scalar Gamma = C.norm();
        // Lambda*(1 - sqrt(1-e^2)) in a form stable down to e = 0
        const Scalar P1 = Lambda * el.e * el.e / (1.0 + std::sqrt(1.0 - el.e * el.e));
        // perihelion longitude, regular as the inclination goes to zero
        const Vec3 P = el.perihelion;
        Scalar cw = P.x() - N.x() * P.z() / (1.0 + N.z());
        Scalar sw = P.y() - N.y() * P.z() / (1.0 + N.z());
        const Scalar wn = std::hypot(cw, sw);
        cw /= wn;
        sw /= wn;
        const Scalar varpi = std::atan2(sw, cw);
        pc.Lambda[i] = Lambda;
        pc.lambda[i] = wrap_angle(el.ell + varpi);
        pc.eta[i] = std::sqrt(2 * P1) * cw;
        pc.xi[i] = -std::sqrt(2 * P1) * sw;
        const Scalar s = std::sqrt(2 * Gamma / (1.0 + N.z()));
        pc.p[i] = -s * N.y();
        pc.q[i] = -s * N.x();
    }
    return pc;
}

EllipseElements poincare_body_elements(Scalar Lambda, Scalar lambda, Scalar eta, Scalar xi,
                                       Scalar p, Scalar q, const SystemMasses& masses, int body) {
    if (!(Lambda > 0)) throw chart_error("poincare: nonpositive Lambda");
    const Scalar P1 = (eta * eta + xi * xi) / 2;
    const Scalar Gamma = Lambda - P1;
    if (!(Gamma > 0)) throw chart_error("poincare: eccentricity variables out of range");
    const Scalar P2 = (p * p + q * q) / 2;
    const Scalar H = Gamma - P2;
    if (!(H > 0)) throw chart_error("poincare: inclination variables out of range");

    EllipseElements el;
    el.a = masses.a_of_lambda(body, Lambda);
    // 1 - (Gamma/Lambda)^2 evaluated without cancellation at small e
    const Scalar u = P1 / Lambda;
    el.e = std::sqrt(std::max(0.0, u * (2.0 - u)));
    const Scalar varpi = (P1 > 0) ? std::atan2(-xi, eta) : 0.0;
    const Scalar Omega = (P2 > 0) ? std::atan2(-q, p) : 0.0;
    const Scalar cos_i = clamp1(H / Gamma);
    const Scalar sin_i = std::sqrt(1.0 - cos_i * cos_i);
    el.normal = Vec3(sin_i * std::sin(Omega), -sin_i * std::cos(Omega), cos_i);
    const Vec3 node(std::cos(Omega), std::sin(Omega), 0.0);
    el.perihelion = rotate_about(el.normal, node, varpi - Omega);
    el.ell = wrap_angle(lambda - varpi);
    return el;
}

CartesianState from_poincare(const PoincareCoords& pc, const SystemMasses& masses) {
    const int n = pc.count();
    std::vector<EllipseElements> els(n);
    for (int i = 0; i < n; ++i)
        els[i] = poincare_body_elements(pc.Lambda[i], pc.lambda[i], pc.eta[i], pc.xi[i], pc.p[i],
                                        pc.q[i], masses, i);
    return state_from_elements(els, masses);
}

// --- P* ---------------------------------------------------------------------

AngularChain angular_chain(const std::vector<EllipseElements>& els, const CartesianState& state,
                           const SystemMasses& masses) {
    (void)masses;
    const int n = static_cast<int>(els.size());
    AngularChain ch;
    ch.C.resize(3, n);
    ch.S.resize(3, n);
    ch.node_nu.resize(3, n);
    ch.node_n.resize(3, n);
    for (int i = 0; i < n; ++i) ch.C.col(i) = state.x.col(i).cross(state.y.col(i));
    ch.S.col(n - 1) = ch.C.col(n - 1);
    for (int j = n - 2; j >= 0; --j) ch.S.col(j) = ch.S.col(j + 1) + ch.C.col(j);

    ch.node_nu.col(0) = AXIS_K.cross(Vec3(ch.S.col(0)));
    for (int j = 0; j + 1 < n; ++j) {
        ch.node_n.col(j) = Vec3(ch.S.col(j)).cross(els[j].perihelion);
        ch.node_nu.col(j + 1) = els[j].perihelion.cross(Vec3(ch.S.col(j + 1)));
    }
    ch.node_n.col(n - 1) = els[n - 1].perihelion;
    return ch;
}

PStarCoords to_pstar(const CartesianState& state, const SystemMasses& masses,
                     const ChartGuards& guards) {
    const int n = state.count();
    std::vector<EllipseElements> els = body_elements(state, masses);
    for (int i = 0; i < n; ++i)
        if (els[i].e <= guards.e_min)
            throw chart_error("pstar: eccentricity of body " + std::to_string(i) +
                              " inside the zero-eccentricity singularity guard");
    const AngularChain ch = angular_chain(els, state, masses);

    // All nodes must stay away from zero: the guard bounds the sine of the
    // angle between the two vectors defining each node.
    if (ch.node_nu.col(0).norm() <= guards.nu_min * ch.S.col(0).norm())
        throw chart_error("pstar: node k x C vanishes (total angular momentum along the pole)");
    for (int j = 0; j + 1 < n; ++j) {
        if (ch.node_n.col(j).norm() <= guards.nu_min * ch.S.col(j).norm())
            throw chart_error("pstar: node S_" + std::to_string(j) + " x P_" + std::to_string(j) +
                              " vanishes");
        if (ch.node_nu.col(j + 1).norm() <= guards.nu_min * ch.S.col(j + 1).norm())
            throw chart_error("pstar: node P_" + std::to_string(j) + " x S_" +
                              std::to_string(j + 1) + " vanishes");
    }

    PStarCoords ps;
    ps.Lambda.resize(n);
    ps.chi.resize(n);
    ps.Theta.resize(n);
    ps.ell.resize(n);
    ps.kappa.resize(n);
    ps.vartheta.resize(n);
    for (int i = 0; i < n; ++i) {
        ps.Lambda[i] = masses.lambda_of_a(i, els[i].a);
        ps.ell[i] = els[i].ell;
        ps.chi[i] = ch.S.col(i).norm();
    }
    ps.Theta[0] = ch.S.col(0).z();
    ps.vartheta[0] = oriented_angle(AXIS_K, AXIS_I, ch.node_nu.col(0));
    ps.kappa[0] = oriented_angle(ch.S.col(0), ch.node_nu.col(0), ch.node_n.col(0));
    for (int j = 1; j < n; ++j) {
        ps.Theta[j] = ch.S.col(j).dot(els[j - 1].perihelion);
        ps.vartheta[j] = oriented_angle(els[j - 1].perihelion, ch.node_n.col(j - 1), ch.node_nu.col(j));
        ps.kappa[j] = oriented_angle(ch.S.col(j), ch.node_nu.col(j), ch.node_n.col(j));
    }
    return ps;
}

CartesianState from_pstar(const PStarCoords& ps, const SystemMasses& masses) {
    const int n = ps.count();
    for (int j = 0; j < n; ++j)
        if (!(ps.chi[j] > 0))
            throw chart_error("pstar: nonpositive chi_" + std::to_string(j));
    if (!(std::abs(ps.Theta[0]) < ps.chi[0]))
        throw chart_error("pstar: |Theta_0| must be below chi_0 (node k x C vanishes)");

    // total angular momentum from (chi_0, Theta_0, vartheta_0)
    const Scalar ch_h = std::sqrt(ps.chi[0] * ps.chi[0] - ps.Theta[0] * ps.Theta[0]);
    Vec3 S_prev(ch_h * std::sin(ps.vartheta[0]), -ch_h * std::cos(ps.vartheta[0]), ps.Theta[0]);
    Vec3 nu_prev = AXIS_K.cross(S_prev).normalized();

    Mat3X C(3, n);
    std::vector<Vec3> perihelion(n);
    for (int j = 0; j + 1 < n; ++j) {
        const Vec3 S_hat = S_prev.normalized();
        const Vec3 n_hat = rotate_about(S_hat, nu_prev, ps.kappa[j]);
        const Scalar cb = ps.Theta[j + 1] / ps.chi[j];
        if (std::abs(cb) > 1)
            throw chart_error("pstar: |Theta_" + std::to_string(j + 1) + "| exceeds chi_" +
                              std::to_string(j));
        const Scalar sb = std::sqrt(1.0 - cb * cb);
        perihelion[j] = (cb * S_hat + sb * n_hat.cross(S_hat)).normalized();

        const Vec3 nu_next = rotate_about(perihelion[j], n_hat, ps.vartheta[j + 1]);
        const Scalar cg = ps.Theta[j + 1] / ps.chi[j + 1];
        if (std::abs(cg) > 1)
            throw chart_error("pstar: |Theta_" + std::to_string(j + 1) + "| exceeds chi_" +
                              std::to_string(j + 1));
        const Scalar sg = std::sqrt(1.0 - cg * cg);
        const Vec3 S_next =
            ps.chi[j + 1] * (cg * perihelion[j] + sg * nu_next.cross(perihelion[j]).normalized());
        C.col(j) = S_prev - S_next;
        S_prev = S_next;
        nu_prev = nu_next.normalized();
    }
    perihelion[n - 1] = rotate_about(S_prev.normalized(), nu_prev, ps.kappa[n - 1]).normalized();
    C.col(n - 1) = S_prev;

    std::vector<EllipseElements> els(n);
    for (int j = 0; j < n; ++j) {
        const Scalar Cn = C.col(j).norm();
        if (!(Cn > 0))
            throw chart_error("pstar: vanishing angular momentum of body " + std::to_string(j));
        if (Cn > ps.Lambda[j] * (1 + 1e-9))
            throw chart_error("pstar: |C_" + std::to_string(j) + "| exceeds Lambda_" +
                              std::to_string(j) + " (no real eccentricity)");
        EllipseElements el;
        el.a = masses.a_of_lambda(j, ps.Lambda[j]);
        const Scalar ratio = std::min(1.0, Cn / ps.Lambda[j]);
        el.e = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
        el.normal = C.col(j).normalized();
        el.perihelion = (perihelion[j] - el.normal * el.normal.dot(perihelion[j])).normalized();
        el.ell = ps.ell[j];
        els[j] = el;
    }
    return state_from_elements(els, masses);
}

PStarCoords apply_reflection(const PStarCoords& ps) {
    PStarCoords out = ps;
    out.Theta = -ps.Theta;
    for (int j = 0; j < ps.count(); ++j) out.vartheta[j] = wrap_angle(-ps.vartheta[j]);
    return out;
}

// --- packing ----------------------------------------------------------------

namespace {
VecX pack6(const VecX& a, const VecX& b, const VecX& c, const VecX& d, const VecX& e,
           const VecX& f) {
    const int n = static_cast<int>(a.size());
    VecX v(6 * n);
    v << a, b, c, d, e, f;
    return v;
}
} // namespace

VecX pack(const DelaunayCoords& c) { return pack6(c.Lambda, c.Gamma, c.H, c.ell, c.g, c.h); }
DelaunayCoords unpack_delaunay(const VecX& v) {
    const int n = static_cast<int>(v.size()) / 6;
    DelaunayCoords c;
    c.Lambda = v.segment(0, n);
    c.Gamma = v.segment(n, n);
    c.H = v.segment(2 * n, n);
    c.ell = v.segment(3 * n, n);
    c.g = v.segment(4 * n, n);
    c.h = v.segment(5 * n, n);
    return c;
}

VecX pack(const PoincareCoords& c) { return pack6(c.Lambda, c.eta, c.p, c.lambda, c.xi, c.q); }
PoincareCoords unpack_poincare(const VecX& v) {
    const int n = static_cast<int>(v.size()) / 6;
    PoincareCoords c;
    c.Lambda = v.segment(0, n);
    c.eta = v.segment(n, n);
    c.p = v.segment(2 * n, n);
    c.lambda = v.segment(3 * n, n);
    c.xi = v.segment(4 * n, n);
    c.q = v.segment(5 * n, n);
    return c;
}

VecX pack(const PStarCoords& c) { return pack6(c.Lambda, c.chi, c.Theta, c.ell, c.kappa, c.vartheta); }
PStarCoords unpack_pstar(const VecX& v) {
    const int n = static_cast<int>(v.size()) / 6;
    PStarCoords c;
    c.Lambda = v.segment(0, n);
    c.chi = v.segment(n, n);
    c.Theta = v.segment(2 * n, n);
    c.ell = v.segment(3 * n, n);
    c.kappa = v.segment(4 * n, n);
    c.vartheta = v.segment(5 * n, n);
    return c;
}

VecX pack(const CartesianState& s) {
    const int n = s.count();
    VecX v(6 * n);
    for (int i = 0; i < n; ++i) {
        v.segment(3 * i, 3) = s.y.col(i);
        v.segment(3 * n + 3 * i, 3) = s.x.col(i);
    }
    return v;
}
CartesianState unpack_cartesian(const VecX& v) {
    const int n = static_cast<int>(v.size()) / 6;
    CartesianState s(n);
    for (int i = 0; i < n; ++i) {
        s.y.col(i) = v.segment(3 * i, 3);
        s.x.col(i) = v.segment(3 * n + 3 * i, 3);
    }
    return s;
}

// --- symplecticity ----------------------------------------------------------

Scalar symplectic_defect(const std::function<VecX(const VecX&)>& to_cartesian_vec,
                         const VecX& point, Scalar fd_step) {
    const int dim = static_cast<int>(point.size());
    MatX J(dim, dim);
    auto column = [&](int k, Scalar h) {
        VecX pp = point, pm = point;
        pp[k] += h;
        pm[k] -= h;
        return VecX((to_cartesian_vec(pp) - to_cartesian_vec(pm)) / (2 * h));
    };
    for (int k = 0; k < dim; ++k) {
        // one Richardson level knocks the truncation term down to O(h^4)
        const Scalar h = fd_step * std::max(1.0, std::abs(point[k]));
        J.col(k) = (4 * column(k, h / 2) - column(k, h)) / 3;
    }
    const int half = dim / 2;
    MatX Omega = MatX::Zero(dim, dim);
    Omega.topRightCorner(half, half) = MatX::Identity(half, half);
    Omega.bottomLeftCorner(half, half) = -MatX::Identity(half, half);
    return (J.transpose() * Omega * J - Omega).cwiseAbs().maxCoeff();
}

SymplecticityReport symplecticity_test(ChartId chart, const std::vector<CartesianState>& points,
                                       const SystemMasses& masses, const ChartGuards& guards,
                                       Scalar fd_step) {
    SymplecticityReport rep;
    for (const CartesianState& st : points) {
        VecX coords;
        std::function<VecX(const VecX&)> fwd;
        try {
            switch (chart) {
                case ChartId::identity:
                    coords = pack(st);
                    fwd = [](const VecX& v) { return v; };
                    break;
                case ChartId::delaunay:
                    coords = pack(to_delaunay(st, masses, guards));
                    fwd = [&masses](const VecX& v) {
                        return pack(from_delaunay(unpack_delaunay(v), masses));
                    };
                    break;
                case ChartId::poincare:
                    coords = pack(to_poincare(st, masses, guards));
                    fwd = [&masses](const VecX& v) {
                        return pack(from_poincare(unpack_poincare(v), masses));
                    };
                    break;
                case ChartId::pstar:
                    coords = pack(to_pstar(st, masses, guards));
                    fwd = [&masses](const VecX& v) {
                        return pack(from_pstar(unpack_pstar(v), masses));
                    };
                    break;
            }
        } catch (const chart_error&) {
            ++rep.skipped;
            continue;
        }
        rep.max_defect = std::max(rep.max_defect, symplectic_defect(fwd, coords, fd_step));
        ++rep.tested;
    }
    return rep;
}

// --- parity tests -----------------------------------------------------------

namespace {
VecX apply_sign_pattern(const VecX& z, int n, int se, int sx, int sp, int sq) {
    VecX out(4 * n);
    out.segment(0, n) = se * z.segment(0, n);
    out.segment(n, n) = sx * z.segment(n, n);
    out.segment(2 * n, n) = sp * z.segment(2 * n, n);
    out.segment(3 * n, n) = sq * z.segment(3 * n, n);
    return out;
}

VecX rotate_z(const VecX& z, int n, Scalar g) {
    // image of a rotation by g about the pole: both rectangular pairs
    // turn by -g
    VecX out(4 * n);
    const Scalar c = std::cos(g), s = std::sin(g);
    for (int i = 0; i < n; ++i) {
        out[i] = c * z[i] + s * z[n + i];
        out[n + i] = c * z[n + i] - s * z[i];
        out[2 * n + i] = c * z[2 * n + i] + s * z[3 * n + i];
        out[3 * n + i] = c * z[3 * n + i] - s * z[2 * n + i];
    }
    return out;
}
} // namespace

ParityReport dalembert_parity_test(const std::function<Scalar(const VecX& z)>& f_av, int n,
                                   const std::vector<VecX>& z_samples,
                                   const std::vector<Scalar>& rotation_angles, Scalar grad_step) {
    ParityReport rep;
    for (const VecX& z : z_samples) {
        const Scalar f0 = f_av(z);
        rep.defect_flip_xi_p =
            std::max(rep.defect_flip_xi_p, std::abs(f0 - f_av(apply_sign_pattern(z, n, 1, -1, -1, 1))));
        rep.defect_flip_eta_q =
            std::max(rep.defect_flip_eta_q, std::abs(f0 - f_av(apply_sign_pattern(z, n, -1, 1, 1, -1))));
        rep.defect_flip_p_q =
            std::max(rep.defect_flip_p_q, std::abs(f0 - f_av(apply_sign_pattern(z, n, 1, 1, -1, -1))));
        for (Scalar g : rotation_angles)
            rep.rotation_defect = std::max(rep.rotation_defect, std::abs(f0 - f_av(rotate_z(z, n, g))));
    }
    VecX grad(4 * n);
    for (int k = 0; k < 4 * n; ++k) {
        VecX zp = VecX::Zero(4 * n), zm = VecX::Zero(4 * n);
        zp[k] += grad_step;
        zm[k] -= grad_step;
        grad[k] = (f_av(zp) - f_av(zm)) / (2 * grad_step);
    }
    rep.gradient_norm_at_0 = grad.norm();
    return rep;
}

} // namespace orblab
