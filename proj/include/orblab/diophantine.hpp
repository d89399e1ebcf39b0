#pragma once

#include "orblab/types.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace orblab {

/// Block filtration of the frequency lattice with per-block scales.
/// A vector k is charged to the first block in which it has a nonzero
/// component; the small-divisor bound there is gammas[block]/|k|_1^tau.
struct DioFiltration {
    std::vector<int> nu_parts;  ///< block sizes, sum = dimension
    VecX gammas;                ///< one scale per block, weakly decreasing
    Scalar tau = 1.0;
    int K = 10;  ///< enumerate 0 < |k|_1 <= K

    int dim() const {
        int d = 0;
        for (int p : nu_parts) d += p;
        return d;
    }
    void validate() const;
};

struct WorstDivisor {
    std::vector<long> k;
    Scalar value = 0;     ///< |omega . k|
    Scalar required = 0;  ///< bound gammas[block]/|k|_1^tau
    Scalar ratio = 0;     ///< value / required; membership needs >= 1 everywhere
};

struct MembershipResult {
    bool member = false;
    WorstDivisor worst;
};

/// Exhaustive small-divisor test of one frequency vector.
MembershipResult dio_membership(const VecX& omega, const DioFiltration& filt);

struct MeasureResult {
    Scalar density = 0;
    Scalar ci_low = 0;   ///< 95% normal-approximation interval
    Scalar ci_high = 0;
    int samples = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo fraction of members in an axis-aligned box; bit-for-bit
/// reproducible for a given (seed, samples).
MeasureResult dio_measure(const std::vector<std::pair<Scalar, Scalar>>& box,
                          const DioFiltration& filt, int samples, std::uint64_t seed);

/// Inputs of the smallness condition; L may be left negative to derive it
/// as max(Mbar, 1/M_k...).
struct KamBudgetInputs {
    Scalar M = 1;        ///< bound on the frequency-map Hessian
    VecX M_k;            ///< per-block submatrix bounds, size m
    Scalar Mbar = 1;     ///< bound on the inverse Hessian
    VecX Mbar_k;         ///< optional per-block inverse bounds (reported only)
    Scalar E = 1;        ///< perturbation norm
    Scalar s = 0.1;      ///< analyticity width (angles), 0 < 4s <= sbar < 1
    Scalar sbar = 0.5;
    Scalar rho = 1;      ///< action-domain radius
    Scalar tau_star = 0; ///< exponent, must exceed the dimension
    VecX gammas;         ///< scales, size m
    Scalar L = -1;       ///< derived when negative
    Scalar c_hat = 1;    ///< configurable constant of the condition
};

struct KamBudgetReport {
    Scalar L = 0;
    Scalar K = 0;
    VecX rho_hat_k;
    Scalar rho_hat = 0;
    Scalar E_hat = 0;
    Scalar condition = 0;  ///< c_hat * E_hat
    bool pass = false;     ///< condition < 1
};

KamBudgetReport kam_budget(const KamBudgetInputs& in);

/// Heuristic perturbation/stiffness scales E = mu * alpha^{-e0} * exp(-Kbar*s),
/// L = alpha^{-l0} / mu for feeding the budget at configuration level.
struct KamHeuristic {
    Scalar mu = 1e-3;
    Scalar alpha = 0.1;
    Scalar Kbar = 10;
    Scalar e0_power = 1;
    Scalar l0_power = 1;
};
void apply_heuristic(KamBudgetInputs& in, const KamHeuristic& h);

} // namespace orblab
