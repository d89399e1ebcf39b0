#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>
#include <string>

namespace orblab {

using Scalar = double;
using Vec3   = Eigen::Matrix<Scalar, 3, 1>;
using VecX   = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using MatX   = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Mat3   = Eigen::Matrix<Scalar, 3, 3>;
// one column per body
using Mat3X  = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;

inline constexpr Scalar PI     = 3.14159265358979323846;
inline constexpr Scalar TWO_PI = 6.28318530717958647692;

/// Thrown when a state hits (or gets too close to) the collision set.
class singularity_error : public std::runtime_error {
public:
    explicit singularity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a point leaves the domain of a coordinate chart
/// (vanishing node, eccentricity below the guard, retrograde orbit, ...).
class chart_error : public std::domain_error {
public:
    explicit chart_error(const std::string& what) : std::domain_error(what) {}
};

/// Thrown when an adaptive quadrature fails to reach the requested
/// tolerance; carries the best estimate obtained.
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, Scalar estimate, Scalar achieved_tol)
        : std::runtime_error(what), estimate(estimate), achieved_tol(achieved_tol) {}
    Scalar estimate;
    Scalar achieved_tol;
};

/// Wrap an angle into [0, 2*pi).
inline Scalar wrap_angle(Scalar a) {
    a = std::fmod(a, TWO_PI);
    if (a < 0) a += TWO_PI;
    return a;
}

/// Distance between two angles on the circle, in [0, pi].
inline Scalar circular_distance(Scalar a, Scalar b) {
    Scalar d = std::fmod(a - b, TWO_PI);
    if (d < -PI) d += TWO_PI;
    if (d > PI) d -= TWO_PI;
    return std::abs(d);
}

/// Oriented angle from a to b, counterclockwise around the unit axis v,
/// in [0, 2*pi).  Computed as atan2 of the components of a, b in the
/// plane orthogonal to v; a and b need not be unit or orthogonal to v.
inline Scalar oriented_angle(const Vec3& v, const Vec3& a, const Vec3& b) {
    const Vec3 vn = v.normalized();
    const Scalar s = a.cross(b).dot(vn);
    const Scalar c = a.dot(b) - a.dot(vn) * b.dot(vn);
    return wrap_angle(std::atan2(s, c));
}

/// Rodrigues rotation of w about the unit axis v by angle t.
inline Vec3 rotate_about(const Vec3& v, const Vec3& w, Scalar t) {
    const Vec3 vn = v.normalized();
    return w * std::cos(t) + vn.cross(w) * std::sin(t) + vn * (vn.dot(w)) * (1 - std::cos(t));
}

/// Pairwise (tree) summation; deterministic regardless of call site.
inline Scalar pairwise_sum(const Scalar* data, Eigen::Index n) {
    if (n <= 4) {
        Scalar s = 0;
        for (Eigen::Index i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const Eigen::Index half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

} // namespace orblab
