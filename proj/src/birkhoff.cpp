#include "orblab/birkhoff.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace orblab {

namespace {

// Richardson-extrapolated second central difference along directions a, b.
Scalar hessian_entry(const PoincareSecular& f, int dim, int a, int b, Scalar f0, Scalar step) {
    auto second_diff = [&](Scalar h) {
        if (a == b) {
            VecX zp = VecX::Zero(dim), zm = VecX::Zero(dim);
            zp[a] += h;
            zm[a] -= h;
            return (f(zp) - 2 * f0 + f(zm)) / (h * h);
        }
        VecX zpp = VecX::Zero(dim), zpm = VecX::Zero(dim), zmp = VecX::Zero(dim),
             zmm = VecX::Zero(dim);
        zpp[a] += h; zpp[b] += h;
        zpm[a] += h; zpm[b] -= h;
        zmp[a] -= h; zmp[b] += h;
        zmm[a] -= h; zmm[b] -= h;
        return (f(zpp) - f(zpm) - f(zmp) + f(zmm)) / (4 * h * h);
    };
    const Scalar d1 = second_diff(step);
    const Scalar d2 = second_diff(step / 2);
    return (4 * d2 - d1) / 3;
}

} // namespace

BirkhoffInvariants compute_invariants(const VecX& Lambda, const SystemMasses& masses,
                                      const BirkhoffOptions& opts) {
    const int n = static_cast<int>(Lambda.size());
    for (int i = 0; i + 1 < n; ++i) {
        const Scalar ai = masses.a_of_lambda(i, Lambda[i]);
        const Scalar aj = masses.a_of_lambda(i + 1, Lambda[i + 1]);
        if (!(ai / aj <= opts.alpha_max))
            throw std::domain_error("compute_invariants: semi-axes not well spaced (ratio " +
                                    std::to_string(ai / aj) + ")");
    }

    const PoincareSecular f(Lambda, masses, opts.quadrature);
    const int dim = 4 * n;
    const Scalar f0 = f(VecX::Zero(dim));

    BirkhoffInvariants inv;
    inv.C0 = f0;
    inv.Qh.resize(n, n);
    inv.Qv.resize(n, n);

    // the step scales with sqrt(Lambda), the natural size of the variables
    auto step_for = [&](int i) { return opts.z_step * std::sqrt(Lambda[i % n]); };

    // quadratic form = 1/2 Hessian; average the two degenerate blocks
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const Scalar h = std::sqrt(step_for(i) * step_for(j));
            const Scalar eta_block = hessian_entry(f, dim, i, j, f0, h);
            const Scalar xi_block = hessian_entry(f, dim, n + i, n + j, f0, h);
            inv.Qh(i, j) = inv.Qh(j, i) = (eta_block + xi_block) / 4;
            const Scalar p_block = hessian_entry(f, dim, 2 * n + i, 2 * n + j, f0, h);
            const Scalar q_block = hessian_entry(f, dim, 3 * n + i, 3 * n + j, f0, h);
            inv.Qv(i, j) = inv.Qv(j, i) = (p_block + q_block) / 4;
        }

    Eigen::SelfAdjointEigenSolver<MatX> eh(inv.Qh);
    Eigen::SelfAdjointEigenSolver<MatX> ev(inv.Qv);
    inv.sigma = eh.eigenvalues();
    inv.varsigma = ev.eigenvalues();
    return inv;
}

ResonanceResiduals resonance_check(const BirkhoffInvariants& inv) {
    ResonanceResiduals r;
    r.varsigma_n = inv.varsigma.cwiseAbs().minCoeff();
    r.trace_sum = std::abs(inv.sigma.sum() + inv.varsigma.sum());
    VecX all(inv.sigma.size() + inv.varsigma.size());
    all << inv.sigma, inv.varsigma;
    r.scale = all.norm();
    return r;
}

namespace {

void enumerate_k(std::vector<long>& k, int pos, int budget, const VecX& freq, Scalar& best,
                 std::vector<long>& best_k) {
    const int dim = static_cast<int>(freq.size());
    if (pos == dim) {
        bool all_zero = true;
        bool multiple_of_ones = true;
        for (long v : k) {
            if (v != 0) all_zero = false;
            if (v != k[0]) multiple_of_ones = false;
        }
        if (all_zero || multiple_of_ones) return;
        Scalar dot = 0;
        for (int i = 0; i < dim; ++i) dot += freq[i] * static_cast<Scalar>(k[i]);
        if (std::abs(dot) < best) {
            best = std::abs(dot);
            best_k = k;
        }
        return;
    }
    for (int v = -budget; v <= budget; ++v) {
        k[pos] = v;
        enumerate_k(k, pos + 1, budget - std::abs(v), freq, best, best_k);
    }
    k[pos] = 0;
}

} // namespace

NonresonanceResult nonresonance_probe(const VecX& frequencies, int p) {
    if (p < 1 || p > 3) throw std::domain_error("nonresonance_probe: order must lie in 1..3");
    NonresonanceResult res;
    res.min_abs = std::numeric_limits<Scalar>::max();
    std::vector<long> k(frequencies.size(), 0);
    enumerate_k(k, 0, 2 * p, frequencies, res.min_abs, res.k_min);
    return res;
}

NonresonanceResult nonresonance_probe(const BirkhoffInvariants& inv, int p) {
    const int n = static_cast<int>(inv.sigma.size());
    // drop the identically-vanishing eigenvalue of Qv
    int drop = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(inv.varsigma[i]) < std::abs(inv.varsigma[drop])) drop = i;
    VecX freq(2 * n - 1);
    freq.head(n) = inv.sigma;
    int at = n;
    for (int i = 0; i < n; ++i)
        if (i != drop) freq[at++] = inv.varsigma[i];
    return nonresonance_probe(freq, p);
}

} // namespace orblab
