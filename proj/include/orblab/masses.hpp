#pragma once

#include "orblab/types.hpp"

#include <vector>

namespace orblab {

/// Mass configuration of a star plus n planets, G = 1 units.
/// The planet masses enter the dynamics as mu * m[i]; the two-body
/// problems see the reduced pairs (reduced_m, reduced_M).
struct SystemMasses {
    Scalar m0 = 1.0;            ///< central mass
    Scalar mu = 0.0;            ///< perturbation scale
    std::vector<Scalar> m;      ///< planet mass factors, size n

    SystemMasses() = default;
    SystemMasses(Scalar m0, Scalar mu, std::vector<Scalar> m_factors)
        : m0(m0), mu(mu), m(std::move(m_factors)) {
        validate();
    }

    int count() const { return static_cast<int>(m.size()); }

    /// m0*m_i/(m0 + mu*m_i)
    Scalar reduced_m(int i) const { return m0 * m[i] / (m0 + mu * m[i]); }
    /// m0 + mu*m_i
    Scalar reduced_M(int i) const { return m0 + mu * m[i]; }

    /// Circular-orbit action for semi-major axis a.
    Scalar lambda_of_a(int i, Scalar a) const {
        return reduced_m(i) * std::sqrt(reduced_M(i) * a);
    }
    Scalar a_of_lambda(int i, Scalar lambda) const {
        const Scalar q = lambda / reduced_m(i);
        return q * q / reduced_M(i);
    }

    void validate() const {
        if (!(m0 > 0)) throw std::domain_error("SystemMasses: m0 must be positive");
        if (!(mu >= 0)) throw std::domain_error("SystemMasses: mu must be nonnegative");
        for (std::size_t i = 0; i < m.size(); ++i)
            if (!(m[i] > 0))
                throw std::domain_error("SystemMasses: planet mass factor " + std::to_string(i) +
                                        " must be positive");
    }
};

} // namespace orblab
