#pragma once

#include "orblab/masses.hpp"
#include "orblab/secular.hpp"
#include "orblab/types.hpp"

#include <vector>

namespace orblab {

/// Constant term and quadratic forms of the averaged perturbation at the
/// co-circular, co-planar point in Poincare variables, with their spectra.
struct BirkhoffInvariants {
    Scalar C0 = 0;
    MatX Qh;       ///< quadratic form on the eccentricity variables
    MatX Qv;       ///< quadratic form on the inclination variables
    VecX sigma;    ///< eigenvalues of Qh, ascending
    VecX varsigma; ///< eigenvalues of Qv, ascending
};

struct BirkhoffOptions {
    QuadratureSpec quadrature{32, 2048, 1e-12};
    Scalar z_step = 1.5e-2;  ///< base step of the Richardson-extrapolated Hessian
    Scalar alpha_max = 0.2;
};

/// Second-order expansion of the averaged perturbation around z = 0 by
/// Richardson-extrapolated central differences of the frozen-node secular
/// evaluator.
BirkhoffInvariants compute_invariants(const VecX& Lambda, const SystemMasses& masses,
                                      const BirkhoffOptions& opts = {});

struct ResonanceResiduals {
    Scalar varsigma_n;   ///< |eigenvalue of Qv nearest zero|
    Scalar trace_sum;    ///< |sum of all eigenvalues of Qh and Qv|
    Scalar scale;        ///< norm of the full spectrum, for relative checks
    Scalar varsigma_n_rel() const { return varsigma_n / scale; }
    Scalar trace_sum_rel() const { return trace_sum / scale; }
};

/// Residuals of the two identities satisfied by the first-order invariants.
ResonanceResiduals resonance_check(const BirkhoffInvariants& inv);

struct NonresonanceResult {
    Scalar min_abs = 0;          ///< min |(sigma, varsigma-bar) . k| over admitted k
    std::vector<long> k_min;     ///< minimizing integer vector
};

/// Scan integer vectors k with 0 < |k|_1 <= 2p, excluding multiples of
/// (1,...,1), against the frequency vector (sigma, varsigma with the
/// near-zero eigenvalue removed).
NonresonanceResult nonresonance_probe(const BirkhoffInvariants& inv, int p);
NonresonanceResult nonresonance_probe(const VecX& frequencies, int p);

} // namespace orblab
