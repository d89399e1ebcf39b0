#pragma once

#include "orblab/charts.hpp"
#include "orblab/masses.hpp"
#include "orblab/two_body.hpp"
#include "orblab/types.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace orblab {

/// Periodic trapezoidal quadrature with node doubling; accepted once a
/// doubling changes the result by less than tol.
struct QuadratureSpec {
    int n0 = 32;
    int n_max = 1024;
    Scalar tol = 1e-10;
};

/// Average of f over the circle; f takes an angle in [0, 2*pi).
Scalar periodic_average(const std::function<Scalar(Scalar)>& f, const QuadratureSpec& spec);

/// Average of f over the two-torus.
Scalar periodic_average_2d(const std::function<Scalar(Scalar, Scalar)>& f,
                           const QuadratureSpec& spec);

/// Sampled positions/momenta of one body along its ellipse at N uniform
/// mean anomalies; the workhorse for torus averages.
struct OrbitSamples {
    std::vector<Vec3> x;
    std::vector<Vec3> y;
    static OrbitSamples sample(const EllipseElements& el, const SystemMasses& masses, int body,
                               int n_nodes);
};

/// Averages of 1/|x|, y and x/|x|^3 over the mean anomaly of one ellipse.
struct OrbitAverages {
    Scalar inv_r;
    Vec3 y;
    Vec3 x_over_r3;
};
OrbitAverages orbit_averages(const EllipseElements& el, const SystemMasses& masses, int body,
                             const QuadratureSpec& spec);

/// Doubly averaged Newtonian pair interaction -m_i m_j <1/|x_i - x_j|>.
/// Fails with singularity_error when the two tori come too close.
Scalar pair_average(const EllipseElements& el_i, const EllipseElements& el_j,
                    const SystemMasses& masses, int body_i, int body_j,
                    const QuadratureSpec& spec);

/// Same integrand at a fixed node count (no adaptivity); used by
/// finite-difference consumers that need smoothness in the parameters.
Scalar pair_average_fixed(const EllipseElements& el_i, const EllipseElements& el_j,
                          const SystemMasses& masses, int body_i, int body_j, int n_nodes);

/// Doubly averaged momentum coupling <y_i . y_j>/m0 (identically zero
/// up to quadrature error; exposed for verification).
Scalar indirect_pair_average(const EllipseElements& el_i, const EllipseElements& el_j,
                             const SystemMasses& masses, int body_i, int body_j,
                             const QuadratureSpec& spec);

/// k-th term of the expansion of the pair average in the inner-to-outer
/// size ratio, via the Legendre kernel |x_i|^k P_k(cos psi)/|x_j|^{k+1}.
/// Requires a_i/a_j < 0.5 and k <= 4.
Scalar pair_order_term(int k, const EllipseElements& el_i, const EllipseElements& el_j,
                       const SystemMasses& masses, int body_i, int body_j,
                       const QuadratureSpec& spec);

/// Secular value of the full averaged perturbation over the mean
/// anomalies at a set of ellipses: sum of all pair averages (the
/// momentum-coupling part averages to zero and is omitted).
Scalar secular_value(const std::vector<EllipseElements>& els, const SystemMasses& masses,
                     const QuadratureSpec& spec);

/// Same with a fixed node count per pair.
Scalar secular_value_fixed(const std::vector<EllipseElements>& els, const SystemMasses& masses,
                           int n_nodes);

/// One averaged pair term (f^(ij)) of a given expansion order, evaluable
/// over chart points.
struct SecularTerm {
    int i = 0;                   ///< inner body
    int j = 1;                   ///< outer body
    std::optional<int> order;    ///< expansion order 0..4, or full average if empty
    QuadratureSpec quadrature;

    Scalar eval(const std::vector<EllipseElements>& els, const SystemMasses& masses) const;
    Scalar eval_pstar(const PStarCoords& ps, const SystemMasses& masses) const;
};

/// Coordinate selector within a P* point.
enum class PStarBlock { Lambda, chi, Theta, ell, kappa, vartheta };

struct DependenceProbeResult {
    Scalar max_variation = 0;
    int evaluated = 0;
    int out_of_domain = 0;  ///< grid points that left the chart domain
};

/// Max variation of a secular term along a grid in one P* coordinate,
/// everything else held fixed.
DependenceProbeResult dependence_probe(const SecularTerm& term, const PStarCoords& base,
                                       const SystemMasses& masses, PStarBlock block, int index,
                                       const VecX& grid_values);

/// Raster of the first nontrivial averaged term of the outermost pair
/// over a grid in (Theta_{n-1}, vartheta_{n-1}); cells outside the chart
/// domain carry NaN.
struct PhasePortrait {
    VecX theta_values;
    VecX vartheta_values;
    MatX values;  ///< rows follow theta, columns vartheta
};
PhasePortrait quadrupole_phase_portrait(const PStarCoords& base, const SystemMasses& masses,
                                        const VecX& theta_grid, const VecX& vartheta_grid,
                                        const QuadratureSpec& spec);

/// Secular evaluator in Poincare rectangular variables at fixed Lambda:
/// z = (eta, xi, p, q) -> sum of pair averages.  The node count is frozen
/// at construction so that the map is smooth in z.
class PoincareSecular {
public:
    PoincareSecular(VecX Lambda, SystemMasses masses, const QuadratureSpec& spec);
    Scalar operator()(const VecX& z) const;
    int body_count() const { return static_cast<int>(lambda_.size()); }
    int nodes() const { return n_nodes_; }

private:
    VecX lambda_;
    SystemMasses masses_;
    int n_nodes_;
};

} // namespace orblab
