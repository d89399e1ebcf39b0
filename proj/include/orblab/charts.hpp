#pragma once

#include "orblab/hamiltonian.hpp"
#include "orblab/masses.hpp"
#include "orblab/two_body.hpp"
#include "orblab/types.hpp"

#include <functional>
#include <vector>

namespace orblab {

/// Classical action-angle chart built on per-body angular momenta.
/// Singular at zero eccentricity and zero (or pi) inclination.
struct DelaunayCoords {
    VecX Lambda, Gamma, H;  ///< actions, n each
    VecX ell, g, h;         ///< conjugate angles, n each
    int count() const { return static_cast<int>(Lambda.size()); }
};

/// Mixed action-angle chart, regular at zero eccentricity/inclination.
/// Canonical pairs (Lambda, lambda), (eta, xi), (p, q).
struct PoincareCoords {
    VecX Lambda, lambda;
    VecX eta, xi, p, q;
    int count() const { return static_cast<int>(Lambda.size()); }
};

/// Action-angle chart reducing the rotational symmetry through the
/// partial angular-momentum sums S_j = sum_{k>=j} C_k and the
/// perihelion nodes; retains the reflection symmetry and is regular
/// for planar configurations.
struct PStarCoords {
    VecX Lambda, chi, Theta;    ///< actions: chi[j] = |S_j|, Theta[0] = C.k, Theta[j] = S_j . P_{j-1}
    VecX ell, kappa, vartheta;  ///< conjugate angles
    int count() const { return static_cast<int>(Lambda.size()); }
};

/// Per-body angular momenta, their partial sums and the node chain.
struct AngularChain {
    Mat3X C;        ///< per-body angular momenta
    Mat3X S;        ///< suffix sums, S.col(0) = total
    Mat3X node_nu;  ///< node_nu.col(0) = k x C, node_nu.col(j) = P_{j-1} x S_j
    Mat3X node_n;   ///< node_n.col(j) = S_j x P_j (j < n-1), node_n.col(n-1) = P_{n-1}
};

/// Domain guards for the singular sets of the charts.
struct ChartGuards {
    Scalar e_min = 1e-3;   ///< eccentricity floor for perihelion-based charts
    Scalar i_min = 1e-3;   ///< inclination floor (Delaunay only)
    Scalar nu_min = 1e-3;  ///< sine of the smallest allowed node angle
};

// --- Delaunay -------------------------------------------------------------

DelaunayCoords to_delaunay(const CartesianState& state, const SystemMasses& masses,
                           const ChartGuards& guards = {});
CartesianState from_delaunay(const DelaunayCoords& dc, const SystemMasses& masses);

// --- Poincare -------------------------------------------------------------

PoincareCoords to_poincare(const CartesianState& state, const SystemMasses& masses,
                           const ChartGuards& guards = {});
CartesianState from_poincare(const PoincareCoords& pc, const SystemMasses& masses);

/// Elements of one body from its Poincare coordinates; regular at zero
/// eccentricity and inclination.
EllipseElements poincare_body_elements(Scalar Lambda, Scalar lambda, Scalar eta, Scalar xi,
                                       Scalar p, Scalar q, const SystemMasses& masses, int body);

// --- P* -------------------------------------------------------------------

AngularChain angular_chain(const std::vector<EllipseElements>& els, const CartesianState& state,
                           const SystemMasses& masses);

PStarCoords to_pstar(const CartesianState& state, const SystemMasses& masses,
                     const ChartGuards& guards = {});
CartesianState from_pstar(const PStarCoords& ps, const SystemMasses& masses);

/// Image of the reflection (y1,-y2,y3,x1,-x2,x3) in the P* chart:
/// (Lambda, chi, -Theta, ell, kappa, -vartheta).
PStarCoords apply_reflection(const PStarCoords& ps);

// --- packing and symplecticity --------------------------------------------

enum class ChartId { identity, delaunay, poincare, pstar };

/// Coordinate vectors ordered (momenta block, coordinate block) so that the
/// standard two-form is sum d(momenta) ^ d(coordinates).
VecX pack(const DelaunayCoords& c);
DelaunayCoords unpack_delaunay(const VecX& v);
VecX pack(const PoincareCoords& c);
PoincareCoords unpack_poincare(const VecX& v);
VecX pack(const PStarCoords& c);
PStarCoords unpack_pstar(const VecX& v);
VecX pack(const CartesianState& s);
CartesianState unpack_cartesian(const VecX& v);

struct SymplecticityReport {
    Scalar max_defect = 0;  ///< max over points of ||J^T Omega J - Omega||_max
    int tested = 0;
    int skipped = 0;  ///< points outside the chart domain
};

/// Finite-difference check that the chart-to-Cartesian map preserves the
/// standard two-form at the given states.
SymplecticityReport symplecticity_test(ChartId chart, const std::vector<CartesianState>& points,
                                       const SystemMasses& masses, const ChartGuards& guards = {},
                                       Scalar fd_step = 1e-5);

/// Defect at a single chart point for a user-supplied map.
Scalar symplectic_defect(const std::function<VecX(const VecX&)>& to_cartesian_vec,
                         const VecX& point, Scalar fd_step = 1e-5);

// --- secular parity tests --------------------------------------------------

/// Report of the parity and rotation symmetries of an averaged
/// perturbation in Poincare rectangular variables z = (eta, xi, p, q).
struct ParityReport {
    Scalar defect_flip_xi_p = 0;    ///< |f(eta,xi,p,q) - f(eta,-xi,-p,q)|, max over samples
    Scalar defect_flip_eta_q = 0;   ///< |f(eta,xi,p,q) - f(-eta,xi,p,-q)|
    Scalar defect_flip_p_q = 0;     ///< |f(eta,xi,p,q) - f(eta,xi,-p,-q)|
    Scalar rotation_defect = 0;     ///< invariance under the simultaneous rotation of (eta,xi),(p,q)
    Scalar gradient_norm_at_0 = 0;  ///< ||grad_z f(0)||, elliptic-equilibrium check
};

ParityReport dalembert_parity_test(const std::function<Scalar(const VecX& z)>& f_av, int n,
                                   const std::vector<VecX>& z_samples,
                                   const std::vector<Scalar>& rotation_angles,
                                   Scalar grad_step = 1e-4);

} // namespace orblab
