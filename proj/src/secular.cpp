#include "orblab/secular.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace orblab {

namespace {

Scalar mean_of(const std::vector<Scalar>& vals) {
    return pairwise_sum(vals.data(), static_cast<Eigen::Index>(vals.size())) /
           static_cast<Scalar>(vals.size());
}

Scalar legendre(int k, Scalar c) {
    switch (k) {
        case 0: return 1.0;
        case 1: return c;
        case 2: return (3 * c * c - 1) / 2;
        case 3: return (5 * c * c * c - 3 * c) / 2;
        case 4: return ((35 * c * c - 30) * c * c + 3) / 8;
        default: throw std::domain_error("legendre: order above 4 not supported");
    }
}

void check_torus_distance(const OrbitSamples& si, const OrbitSamples& sj, int body_i, int body_j) {
    // coarse scan; the guard mirrors the collision guard of the Hamiltonian
    const Scalar floor = 10 * 1e-8;
    Scalar dmin = std::numeric_limits<Scalar>::max();
    const std::size_t step_i = std::max<std::size_t>(1, si.x.size() / 32);
    const std::size_t step_j = std::max<std::size_t>(1, sj.x.size() / 32);
    for (std::size_t a = 0; a < si.x.size(); a += step_i)
        for (std::size_t b = 0; b < sj.x.size(); b += step_j)
            dmin = std::min(dmin, (si.x[a] - sj.x[b]).norm());
    if (dmin < floor)
        throw singularity_error("secular: orbits of bodies " + std::to_string(body_i) + " and " +
                                std::to_string(body_j) + " intersect (min distance " +
                                std::to_string(dmin) + ")");
}

} // namespace

Scalar periodic_average(const std::function<Scalar(Scalar)>& f, const QuadratureSpec& spec) {
    Scalar prev = 0;
    bool have_prev = false;
    for (int n = spec.n0; n <= spec.n_max; n *= 2) {
        std::vector<Scalar> vals(n);
        for (int i = 0; i < n; ++i) vals[i] = f(TWO_PI * i / n);
        const Scalar cur = mean_of(vals);
        if (have_prev && std::abs(cur - prev) < spec.tol) return cur;
        prev = cur;
        have_prev = true;
    }
    throw accuracy_error("periodic_average: not converged at n_max", prev, spec.tol);
}

Scalar periodic_average_2d(const std::function<Scalar(Scalar, Scalar)>& f,
                           const QuadratureSpec& spec) {
    Scalar prev = 0;
    bool have_prev = false;
    for (int n = spec.n0; n <= spec.n_max; n *= 2) {
        std::vector<Scalar> rows(n);
        std::vector<Scalar> vals(n);
        for (int a = 0; a < n; ++a) {
            const Scalar u = TWO_PI * a / n;
            for (int b = 0; b < n; ++b) vals[b] = f(u, TWO_PI * b / n);
            rows[a] = mean_of(vals);
        }
        const Scalar cur = mean_of(rows);
        if (have_prev && std::abs(cur - prev) < spec.tol) return cur;
        prev = cur;
        have_prev = true;
    }
    throw accuracy_error("periodic_average_2d: not converged at n_max", prev, spec.tol);
}

OrbitSamples OrbitSamples::sample(const EllipseElements& el, const SystemMasses& masses, int body,
                                  int n_nodes) {
    OrbitSamples s;
    s.x.resize(n_nodes);
    s.y.resize(n_nodes);
    EllipseElements e = el;
    for (int i = 0; i < n_nodes; ++i) {
        e.ell = TWO_PI * i / n_nodes;
        Vec3 y, x;
        elements_to_cartesian(e, masses, body, y, x);
        s.x[i] = x;
        s.y[i] = y;
    }
    return s;
}

OrbitAverages orbit_averages(const EllipseElements& el, const SystemMasses& masses, int body,
                             const QuadratureSpec& spec) {
    OrbitAverages out;
    EllipseElements e = el;
    auto at = [&](Scalar ell) {
        e.ell = ell;
        Vec3 y, x;
        elements_to_cartesian(e, masses, body, y, x);
        return std::pair<Vec3, Vec3>(y, x);
    };
    out.inv_r = periodic_average([&](Scalar l) { return 1.0 / at(l).second.norm(); }, spec);
    for (int c = 0; c < 3; ++c) {
        out.y[c] = periodic_average([&](Scalar l) { return at(l).first[c]; }, spec);
        out.x_over_r3[c] = periodic_average(
            [&](Scalar l) {
                const Vec3 x = at(l).second;
                return x[c] / std::pow(x.norm(), 3);
            },
            spec);
    }
    return out;
}

namespace {

Scalar grid_mean_pair(const OrbitSamples& si, const OrbitSamples& sj,
                      const std::function<Scalar(const Vec3&, const Vec3&)>& kernel) {
    const int ni = static_cast<int>(si.x.size());
    const int nj = static_cast<int>(sj.x.size());
    std::vector<Scalar> rows(ni);
    std::vector<Scalar> vals(nj);
    for (int a = 0; a < ni; ++a) {
        for (int b = 0; b < nj; ++b) vals[b] = kernel(si.x[a], sj.x[b]);
        rows[a] = mean_of(vals);
    }
    return mean_of(rows);
}

Scalar adaptive_pair(const EllipseElements& el_i, const EllipseElements& el_j,
                     const SystemMasses& masses, int body_i, int body_j,
                     const QuadratureSpec& spec,
                     const std::function<Scalar(const Vec3&, const Vec3&)>& kernel,
                     bool collision_check) {
    Scalar prev = 0;
    bool have_prev = false;
    for (int n = spec.n0; n <= spec.n_max; n *= 2) {
        const OrbitSamples si = OrbitSamples::sample(el_i, masses, body_i, n);
        const OrbitSamples sj = OrbitSamples::sample(el_j, masses, body_j, n);
        if (collision_check && n == spec.n0) check_torus_distance(si, sj, body_i, body_j);
        const Scalar cur = grid_mean_pair(si, sj, kernel);
        if (have_prev && std::abs(cur - prev) < spec.tol) return cur;
        prev = cur;
        have_prev = true;
    }
    throw accuracy_error("secular pair average: not converged at n_max", prev, spec.tol);
}

} // namespace

Scalar pair_average(const EllipseElements& el_i, const EllipseElements& el_j,
                    const SystemMasses& masses, int body_i, int body_j,
                    const QuadratureSpec& spec) {
    const Scalar mm = masses.m[body_i] * masses.m[body_j];
    return adaptive_pair(
        el_i, el_j, masses, body_i, body_j, spec,
        [mm](const Vec3& xi, const Vec3& xj) { return -mm / (xi - xj).norm(); }, true);
}

Scalar pair_average_fixed(const EllipseElements& el_i, const EllipseElements& el_j,
                          const SystemMasses& masses, int body_i, int body_j, int n_nodes) {
    const Scalar mm = masses.m[body_i] * masses.m[body_j];
    const OrbitSamples si = OrbitSamples::sample(el_i, masses, body_i, n_nodes);
    const OrbitSamples sj = OrbitSamples::sample(el_j, masses, body_j, n_nodes);
    return grid_mean_pair(si, sj,
                          [mm](const Vec3& xi, const Vec3& xj) { return -mm / (xi - xj).norm(); });
}

Scalar indirect_pair_average(const EllipseElements& el_i, const EllipseElements& el_j,
                             const SystemMasses& masses, int body_i, int body_j,
                             const QuadratureSpec& spec) {
    Scalar prev = 0;
    bool have_prev = false;
    for (int n = spec.n0; n <= spec.n_max; n *= 2) {
        const OrbitSamples si = OrbitSamples::sample(el_i, masses, body_i, n);
        const OrbitSamples sj = OrbitSamples::sample(el_j, masses, body_j, n);
        std::vector<Scalar> rows(n);
        std::vector<Scalar> vals(n);
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) vals[b] = si.y[a].dot(sj.y[b]) / masses.m0;
            rows[a] = mean_of(vals);
        }
        const Scalar mean = mean_of(rows);
        if (have_prev && std::abs(mean - prev) < spec.tol) return mean;
        prev = mean;
        have_prev = true;
    }
    throw accuracy_error("indirect pair average: not converged at n_max", prev, spec.tol);
}

Scalar pair_order_term(int k, const EllipseElements& el_i, const EllipseElements& el_j,
                       const SystemMasses& masses, int body_i, int body_j,
                       const QuadratureSpec& spec) {
    if (k < 0 || k > 4) throw std::domain_error("pair_order_term: order must lie in 0..4");
    if (!(el_i.a / el_j.a < 0.5))
        throw std::domain_error("pair_order_term: semi-axis ratio must stay below 1/2");
    const Scalar mm = masses.m[body_i] * masses.m[body_j];
    return adaptive_pair(
        el_i, el_j, masses, body_i, body_j, spec,
        [mm, k](const Vec3& xi, const Vec3& xj) {
            const Scalar ri = xi.norm(), rj = xj.norm();
            const Scalar c = xi.dot(xj) / (ri * rj);
            return -mm * std::pow(ri, k) * legendre(k, c) / std::pow(rj, k + 1);
        },
        false);
}

Scalar secular_value(const std::vector<EllipseElements>& els, const SystemMasses& masses,
                     const QuadratureSpec& spec) {
    Scalar total = 0;
    const int n = static_cast<int>(els.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) total += pair_average(els[i], els[j], masses, i, j, spec);
    return total;
}

Scalar secular_value_fixed(const std::vector<EllipseElements>& els, const SystemMasses& masses,
                           int n_nodes) {
    Scalar total = 0;
    const int n = static_cast<int>(els.size());
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            total += pair_average_fixed(els[i], els[j], masses, i, j, n_nodes);
    return total;
}

Scalar SecularTerm::eval(const std::vector<EllipseElements>& els, const SystemMasses& masses) const {
    if (order)
        return pair_order_term(*order, els[i], els[j], masses, i, j, quadrature);
    return pair_average(els[i], els[j], masses, i, j, quadrature);
}

Scalar SecularTerm::eval_pstar(const PStarCoords& ps, const SystemMasses& masses) const {
    const CartesianState st = from_pstar(ps, masses);
    std::vector<EllipseElements> els(st.count());
    for (int b = 0; b < st.count(); ++b)
        els[b] = cartesian_to_elements(st.y.col(b), st.x.col(b), masses, b);
    return eval(els, masses);
}

DependenceProbeResult dependence_probe(const SecularTerm& term, const PStarCoords& base,
                                       const SystemMasses& masses, PStarBlock block, int index,
                                       const VecX& grid_values) {
    DependenceProbeResult res;
    bool have_ref = false;
    Scalar ref = 0;
    for (int gi = 0; gi < grid_values.size(); ++gi) {
        PStarCoords ps = base;
        VecX* target = nullptr;
        switch (block) {
            case PStarBlock::Lambda: target = &ps.Lambda; break;
            case PStarBlock::chi: target = &ps.chi; break;
            case PStarBlock::Theta: target = &ps.Theta; break;
            case PStarBlock::ell: target = &ps.ell; break;
            case PStarBlock::kappa: target = &ps.kappa; break;
            case PStarBlock::vartheta: target = &ps.vartheta; break;
        }
        (*target)[index] = grid_values[gi];
        try {
            const Scalar v = term.eval_pstar(ps, masses);
            if (!have_ref) {
                ref = v;
                have_ref = true;
            }
            res.max_variation = std::max(res.max_variation, std::abs(v - ref));
            ++res.evaluated;
        } catch (const chart_error&) {
            ++res.out_of_domain;
        }
    }
    return res;
}

PhasePortrait quadrupole_phase_portrait(const PStarCoords& base, const SystemMasses& masses,
                                        const VecX& theta_grid, const VecX& vartheta_grid,
                                        const QuadratureSpec& spec) {
    const int n = base.count();
    SecularTerm term;
    term.i = n - 2;
    term.j = n - 1;
    term.order = 2;
    term.quadrature = spec;

    PhasePortrait pp;
    pp.theta_values = theta_grid;
    pp.vartheta_values = vartheta_grid;
    pp.values.resize(theta_grid.size(), vartheta_grid.size());
    for (int a = 0; a < theta_grid.size(); ++a)
        for (int b = 0; b < vartheta_grid.size(); ++b) {
            PStarCoords ps = base;
            ps.Theta[n - 1] = theta_grid[a];
            ps.vartheta[n - 1] = vartheta_grid[b];
            try {
                pp.values(a, b) = term.eval_pstar(ps, masses);
            } catch (const chart_error&) {
                pp.values(a, b) = std::numeric_limits<Scalar>::quiet_NaN();
            }
        }
    return pp;
}

PoincareSecular::PoincareSecular(VecX Lambda, SystemMasses masses, const QuadratureSpec& spec)
    : lambda_(std::move(Lambda)), masses_(std::move(masses)) {
    // freeze the node count by converging the doubly averaged value at z = 0
    const int n = static_cast<int>(lambda_.size());
    std::vector<EllipseElements> els(n);
    for (int i = 0; i < n; ++i)
        els[i] = poincare_body_elements(lambda_[i], 0.0, 0, 0, 0, 0, masses_, i);
    int chosen = spec.n_max;
    Scalar prev = 0;
    bool have_prev = false;
    for (int nn = spec.n0; nn <= spec.n_max; nn *= 2) {
        const Scalar cur = secular_value_fixed(els, masses_, nn);
        if (have_prev && std::abs(cur - prev) < spec.tol) {
            chosen = nn;
            break;
        }
        prev = cur;
        have_prev = true;
        chosen = nn;
    }
    n_nodes_ = chosen;
}

Scalar PoincareSecular::operator()(const VecX& z) const {
    const int n = body_count();
    std::vector<EllipseElements> els(n);
    for (int i = 0; i < n; ++i)
        els[i] = poincare_body_elements(lambda_[i], 0.0, z[i], z[n + i], z[2 * n + i],
                                        z[3 * n + i], masses_, i);
    return secular_value_fixed(els, masses_, n_nodes_);
}

} // namespace orblab
