#include "orblab/diophantine.hpp"

#include "orblab/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace orblab {

void DioFiltration::validate() const {
    if (nu_parts.empty()) throw std::domain_error("DioFiltration: empty partition");
    for (int p : nu_parts)
        if (p <= 0) throw std::domain_error("DioFiltration: partition sizes must be positive");
    if (gammas.size() != static_cast<Eigen::Index>(nu_parts.size()))
        throw std::domain_error("DioFiltration: one gamma per block required");
    for (int i = 0; i < gammas.size(); ++i) {
        if (!(gammas[i] > 0)) throw std::domain_error("DioFiltration: gammas must be positive");
        if (i > 0 && gammas[i] > gammas[i - 1] * (1 + 1e-12))
            throw std::domain_error("DioFiltration: gammas must be weakly decreasing");
    }
    if (!(tau > 0)) throw std::domain_error("DioFiltration: tau must be positive");
    if (K < 1) throw std::domain_error("DioFiltration: K must be at least 1");
}

namespace {

// Enumerate k with |k|_1 = shell over dims [first, dim), lexicographic,
// and feed each completed vector to the visitor.
template <typename Visit>
void enumerate_shell(std::vector<long>& k, int pos, int dim, int remaining, Visit&& visit) {
    if (pos == dim) {
        if (remaining == 0) visit(k);
        return;
    }
    for (int v = -remaining; v <= remaining; ++v) {
        k[pos] = v;
        enumerate_shell(k, pos + 1, dim, remaining - std::abs(v), visit);
    }
    k[pos] = 0;
}

} // namespace

MembershipResult dio_membership(const VecX& omega, const DioFiltration& filt) {
    filt.validate();
    const int dim = filt.dim();
    if (omega.size() != dim) throw std::domain_error("dio_membership: dimension mismatch");

    const int m = static_cast<int>(filt.nu_parts.size());
    std::vector<int> block_start(m + 1, 0);
    for (int b = 0; b < m; ++b) block_start[b + 1] = block_start[b] + filt.nu_parts[b];

    MembershipResult res;
    res.member = true;
    res.worst.ratio = std::numeric_limits<Scalar>::max();

    // blocks outermost, shells innermost, lexicographic within a shell
    for (int b = 0; b < m; ++b) {
        const int lead = block_start[b];
        const int lead_end = block_start[b + 1];
        const int sub_dim = dim - lead;
        std::vector<long> k(sub_dim, 0);
        for (int shell = 1; shell <= filt.K; ++shell) {
            enumerate_shell(k, 0, sub_dim, shell, [&](const std::vector<long>& kk) {
                // charged to block b only when the leading block is nonzero
                bool lead_nonzero = false;
                for (int i = 0; i < lead_end - lead; ++i)
                    if (kk[i] != 0) lead_nonzero = true;
                if (!lead_nonzero) return;
                Scalar dot = 0;
                for (int i = 0; i < sub_dim; ++i)
                    dot += omega[lead + i] * static_cast<Scalar>(kk[i]);
                const Scalar value = std::abs(dot);
                const Scalar required = filt.gammas[b] / std::pow(static_cast<Scalar>(shell), filt.tau);
                const Scalar ratio = value / required;
                if (ratio < res.worst.ratio) {
                    res.worst.ratio = ratio;
                    res.worst.value = value;
                    res.worst.required = required;
                    res.worst.k.assign(dim, 0);
                    for (int i = 0; i < sub_dim; ++i) res.worst.k[lead + i] = kk[i];
                }
                if (value < required) res.member = false;
            });
        }
    }
    return res;
}

MeasureResult dio_measure(const std::vector<std::pair<Scalar, Scalar>>& box,
                          const DioFiltration& filt, int samples, std::uint64_t seed) {
    filt.validate();
    const int dim = filt.dim();
    if (static_cast<int>(box.size()) != dim) throw std::domain_error("dio_measure: box dimension mismatch");
    for (const auto& [lo, hi] : box)
        if (!(hi > lo)) throw std::domain_error("dio_measure: degenerate box");

    SplitMix64 rng(seed);
    int members = 0;
    VecX omega(dim);
    for (int s = 0; s < samples; ++s) {
        for (int d = 0; d < dim; ++d) omega[d] = rng.uniform(box[d].first, box[d].second);
        if (dio_membership(omega, filt).member) ++members;
    }
    MeasureResult res;
    res.samples = samples;
    res.seed = seed;
    res.density = static_cast<Scalar>(members) / samples;
    const Scalar se = std::sqrt(std::max(res.density * (1 - res.density), 1e-12) / samples);
    res.ci_low = std::max(0.0, res.density - 1.96 * se);
    res.ci_high = std::min(1.0, res.density + 1.96 * se);
    return res;
}

KamBudgetReport kam_budget(const KamBudgetInputs& in) {
    const int m = static_cast<int>(in.M_k.size());
    if (m < 1) throw std::domain_error("kam_budget: at least one block bound M_k required");
    if (in.gammas.size() != m) throw std::domain_error("kam_budget: one gamma per block required");
    for (int i = 0; i < m; ++i) {
        if (!(in.M_k[i] > 0)) throw std::domain_error("kam_budget: M_k must be positive");
        if (!(in.gammas[i] > 0)) throw std::domain_error("kam_budget: gammas must be positive");
    }
    if (!(in.M > 0 && in.Mbar > 0 && in.E > 0 && in.rho > 0))
        throw std::domain_error("kam_budget: norm bounds must be positive");
    if (!(in.s > 0 && 4 * in.s <= in.sbar && in.sbar < 1))
        throw std::domain_error("kam_budget: widths must satisfy 0 < 4s <= sbar < 1");
    if (!(in.tau_star > 0)) throw std::domain_error("kam_budget: tau_star must be positive");

    KamBudgetReport rep;
    if (in.L > 0) {
        rep.L = in.L;
    } else {
        rep.L = in.Mbar;
        for (int i = 0; i < m; ++i) rep.L = std::max(rep.L, 1.0 / in.M_k[i]);
    }
    const Scalar arg = (in.gammas[0] * in.gammas[0]) / (in.E * in.M_k[0] * in.M_k[0] * rep.L);
    rep.K = (6.0 / in.s) * std::max(1.0, std::log(arg));
    rep.rho_hat_k.resize(m);
    rep.rho_hat = in.rho;
    for (int i = 0; i < m; ++i) {
        rep.rho_hat_k[i] = in.gammas[i] / (3 * in.M_k[i] * std::pow(rep.K, in.tau_star + 1));
        rep.rho_hat = std::min(rep.rho_hat, rep.rho_hat_k[i]);
    }
    rep.E_hat = in.E * rep.L / (rep.rho_hat * rep.rho_hat);
    rep.condition = in.c_hat * rep.E_hat;
    rep.pass = rep.condition < 1;
    return rep;
}

void apply_heuristic(KamBudgetInputs& in, const KamHeuristic& h) {
    if (!(h.mu > 0 && h.alpha > 0)) throw std::domain_error("kam heuristic: mu, alpha must be positive");
    in.E = h.mu * std::pow(h.alpha, -h.e0_power) * std::exp(-h.Kbar * in.s);
    in.L = std::pow(h.alpha, -h.l0_power) / h.mu;
}

} // namespace orblab
