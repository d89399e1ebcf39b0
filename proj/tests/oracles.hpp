#pragma once

// Test-side oracles, independent of the library code paths they check.

#include "orblab/charts.hpp"
#include "orblab/hamiltonian.hpp"
#include "orblab/masses.hpp"
#include "orblab/rng.hpp"
#include "orblab/two_body.hpp"
#include "orblab/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

using namespace orblab;

/// Plain bisection on E - e sin E = ell over [0, 2*pi]; no Newton anywhere.
inline Scalar kepler_bisection(Scalar ell, Scalar e, int iterations = 80) {
    ell = wrap_angle(ell);
    Scalar lo = 0.0, hi = TWO_PI;
    for (int i = 0; i < iterations; ++i) {
        const Scalar mid = 0.5 * (lo + hi);
        if (mid - e * std::sin(mid) - ell > 0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Laplace coefficient b_s^(k)(alpha) by dense periodic trapezoid.
inline Scalar laplace_coefficient(Scalar s, int k, Scalar alpha, int n_nodes = 4096) {
    Scalar sum = 0;
    for (int i = 0; i < n_nodes; ++i) {
        const Scalar t = TWO_PI * i / n_nodes;
        sum += std::cos(k * t) / std::pow(1 - 2 * alpha * std::cos(t) + alpha * alpha, s);
    }
    return sum / n_nodes * 2.0;  // (1/pi) integral over [0, 2*pi)
}

/// Classical first-order secular forms for the co-circular, co-planar
/// point: the quadratic expansion of the doubly averaged pair interaction
///   a_j <1/D> = b_{1/2}^0/2 + (alpha/8) b_{3/2}^1 (e_i^2 + e_j^2)
///             - (alpha/4) b_{3/2}^2 e_i e_j cos(varpi_i - varpi_j)
///             - (alpha/8) b_{3/2}^1 (I_i^2 + I_j^2 - 2 I_i I_j cos(O_i - O_j))
/// rewritten on the rectangular variables (e ~ |z_h|/sqrt(Lambda)).
struct SecularFormsOracle {
    MatX Qh, Qv;
    Scalar C0 = 0;
};

inline SecularFormsOracle laplace_secular_forms(const VecX& Lambda, const SystemMasses& masses) {
    const int n = static_cast<int>(Lambda.size());
    SecularFormsOracle out;
    out.Qh = MatX::Zero(n, n);
    out.Qv = MatX::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const Scalar ai = masses.a_of_lambda(i, Lambda[i]);
            const Scalar aj = masses.a_of_lambda(j, Lambda[j]);
            const Scalar alpha = ai / aj;
            const Scalar mm = masses.m[i] * masses.m[j];
            const Scalar b0 = laplace_coefficient(0.5, 0, alpha);
            const Scalar b1 = laplace_coefficient(1.5, 1, alpha);
            const Scalar b2 = laplace_coefficient(1.5, 2, alpha);
            out.C0 += -(mm / aj) * b0 / 2;
            const Scalar c = (mm / aj) * alpha / 8;
            out.Qh(i, i) += -c * b1 / Lambda[i];
            out.Qh(j, j) += -c * b1 / Lambda[j];
            out.Qh(i, j) += c * b2 / std::sqrt(Lambda[i] * Lambda[j]);
            out.Qv(i, i) += c * b1 / Lambda[i];
            out.Qv(j, j) += c * b1 / Lambda[j];
            out.Qv(i, j) += -c * b1 / std::sqrt(Lambda[i] * Lambda[j]);
        }
    out.Qh = MatX(out.Qh.selfadjointView<Eigen::Upper>());
    out.Qv = MatX(out.Qv.selfadjointView<Eigen::Upper>());
    return out;
}

/// Term-by-term re-summation of the Hamiltonian, written independently
/// of the library implementation.
inline Scalar naive_hamiltonian(const CartesianState& st, const SystemMasses& ms) {
    Scalar h = 0;
    for (int i = 0; i < st.count(); ++i) {
        const Scalar mi = ms.m0 * ms.m[i] / (ms.m0 + ms.mu * ms.m[i]);
        const Scalar Mi = ms.m0 + ms.mu * ms.m[i];
        Scalar y2 = 0;
        for (int c = 0; c < 3; ++c) y2 += st.y(c, i) * st.y(c, i);
        Scalar r = 0;
        for (int c = 0; c < 3; ++c) r += st.x(c, i) * st.x(c, i);
        r = std::sqrt(r);
        h += y2 / (2 * mi) - mi * Mi / r;
    }
    for (int i = 0; i < st.count(); ++i)
        for (int j = 0; j < st.count(); ++j) {
            if (j <= i) continue;
            Scalar dot = 0, d2 = 0;
            for (int c = 0; c < 3; ++c) {
                dot += st.y(c, i) * st.y(c, j);
                const Scalar d = st.x(c, i) - st.x(c, j);
                d2 += d * d;
            }
            h += ms.mu * (dot / ms.m0 - ms.m[i] * ms.m[j] / std::sqrt(d2));
        }
    return h;
}

/// Classical (single-scale) Diophantine verdict, independent loop.
inline bool classical_diophantine(const VecX& omega, Scalar gamma, Scalar tau, int K) {
    const int dim = static_cast<int>(omega.size());
    std::vector<long> k(dim, 0);
    std::function<bool(int, int)> rec = [&](int pos, int remaining) -> bool {
        if (pos == dim) {
            long l1 = 0;
            Scalar dot = 0;
            for (int d = 0; d < dim; ++d) {
                l1 += std::labs(k[d]);
                dot += omega[d] * static_cast<Scalar>(k[d]);
            }
            if (l1 == 0) return true;
            return std::abs(dot) >= gamma / std::pow(static_cast<Scalar>(l1), tau);
        }
        for (int v = -remaining; v <= remaining; ++v) {
            k[pos] = v;
            if (!rec(pos + 1, remaining - std::abs(v))) return false;
        }
        k[pos] = 0;
        return true;
    };
    return rec(0, K);
}

/// Random rotation matrix from three uniform angles.
inline Mat3 random_rotation(SplitMix64& rng) {
    const Scalar a = rng.uniform(0, TWO_PI), b = rng.uniform(0, TWO_PI), c = rng.uniform(0, PI);
    Mat3 Rz1, Rx, Rz2;
    Rz1 << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    Rx << 1, 0, 0, 0, std::cos(c), -std::sin(c), 0, std::sin(c), std::cos(c);
    Rz2 << std::cos(b), -std::sin(b), 0, std::sin(b), std::cos(b), 0, 0, 0, 1;
    return Rz1 * Rx * Rz2;
}

/// Random orbital elements of a bound, non-degenerate orbit.
inline EllipseElements random_elements(SplitMix64& rng, Scalar a_lo, Scalar a_hi, Scalar e_lo,
                                       Scalar e_hi) {
    EllipseElements el;
    el.a = rng.uniform(a_lo, a_hi);
    el.e = rng.uniform(e_lo, e_hi);
    // uniform unit normal, then an in-plane perihelion
    const Scalar z = rng.uniform(-1, 1);
    const Scalar ph = rng.uniform(0, TWO_PI);
    const Scalar r = std::sqrt(std::max(0.0, 1 - z * z));
    el.normal = Vec3(r * std::cos(ph), r * std::sin(ph), z);
    Vec3 seed(rng.normal(), rng.normal(), rng.normal());
    seed -= el.normal * el.normal.dot(seed);
    el.perihelion = seed.normalized();
    el.ell = rng.uniform(0, TWO_PI);
    return el;
}

/// Well-spaced prograde system of n planets with moderate e and i.
inline std::vector<EllipseElements> random_system_elements(SplitMix64& rng, int n, Scalar e_lo,
                                                           Scalar e_hi, Scalar incl_max,
                                                           Scalar ratio_lo = 0.1,
                                                           Scalar ratio_hi = 0.3) {
    std::vector<EllipseElements> els(n);
    Scalar a = rng.uniform(0.8, 1.2);
    for (int i = 0; i < n; ++i) {
        EllipseElements el;
        el.a = a;
        a /= rng.uniform(ratio_lo, ratio_hi);
        el.e = rng.uniform(e_lo, e_hi);
        const Scalar incl = rng.uniform(0.02, incl_max);
        const Scalar node = rng.uniform(0, TWO_PI);
        el.normal = Vec3(std::sin(incl) * std::sin(node), -std::sin(incl) * std::cos(node),
                         std::cos(incl));
        const Vec3 nvec(std::cos(node), std::sin(node), 0.0);
        el.perihelion = rotate_about(el.normal, nvec, rng.uniform(0, TWO_PI));
        el.ell = rng.uniform(0, TWO_PI);
        els[i] = el;
    }
    return els;
}

/// Marching-squares census of a level set on a raster: counts interior
/// cell-edge crossings and crossings on the outer boundary of the grid.
/// Every level curve is closed iff the boundary count is zero.
struct ContourCensus {
    int interior_crossings = 0;
    int boundary_crossings = 0;
    bool has_nan = false;
};

inline ContourCensus contour_census(const MatX& values, Scalar level) {
    ContourCensus c;
    const int rows = static_cast<int>(values.rows());
    const int cols = static_cast<int>(values.cols());
    auto crosses = [&](Scalar a, Scalar b) {
        if (std::isnan(a) || std::isnan(b)) {
            c.has_nan = true;
            return false;
        }
        return (a - level) * (b - level) < 0;
    };
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j + 1 < cols; ++j)
            if (crosses(values(i, j), values(i, j + 1))) {
                if (i == 0 || i == rows - 1)
                    ++c.boundary_crossings;
                else
                    ++c.interior_crossings;
            }
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i + 1 < rows; ++i)
            if (crosses(values(i, j), values(i + 1, j))) {
                if (j == 0 || j == cols - 1)
                    ++c.boundary_crossings;
                else
                    ++c.interior_crossings;
            }
    return c;
}

/// Least-squares slope of log(y) against log(x).
inline Scalar loglog_slope(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
    const int n = static_cast<int>(x.size());
    Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const Scalar lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracles
