// patchvote/core/pose.hpp — rigid transforms with canonical unit quaternions.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>

namespace pv {

/// Returns q or -q such that the first nonzero component of (w,x,y,z) is
/// positive. Makes equality tests well-defined under the double cover.
inline Eigen::Quaterniond canonical(const Eigen::Quaterniond& q) {
    const double c[4] = {q.w(), q.x(), q.y(), q.z()};
    for (double v : c) {
        if (v > 0.0) return q;
        if (v < 0.0) return Eigen::Quaterniond(-q.w(), -q.x(), -q.y(), -q.z());
    }
    return q;
}

/// Rigid transform: x -> R x + t. Rotation is stored as a unit quaternion
/// with w >= 0; construction normalizes and canonicalizes.
class Pose {
public:
    Pose() : q_(1.0, 0.0, 0.0, 0.0), t_(Eigen::Vector3d::Zero()) {}

    Pose(const Eigen::Quaterniond& q, const Eigen::Vector3d& t)
        : q_(canonical(q.normalized())), t_(t) {}

    static Pose from_matrix(const Eigen::Matrix3d& R, const Eigen::Vector3d& t) {
        return Pose(Eigen::Quaterniond(R), t);
    }

    static Pose from_axis_angle(const Eigen::Vector3d& axis, double angle_rad,
                                const Eigen::Vector3d& t = Eigen::Vector3d::Zero()) {
        return Pose(Eigen::Quaterniond(Eigen::AngleAxisd(angle_rad, axis.normalized())), t);
    }

    const Eigen::Quaterniond& rotation() const { return q_; }
    const Eigen::Vector3d& translation() const { return t_; }
    Eigen::Matrix3d rotation_matrix() const { return q_.toRotationMatrix(); }

    Eigen::Vector3d operator()(const Eigen::Vector3d& p) const { return q_ * p + t_; }

    /// Composition: (a * b)(x) = a(b(x)).
    Pose operator*(const Pose& o) const { return Pose(q_ * o.q_, q_ * o.t_ + t_); }

    Pose inverse() const {
        Eigen::Quaterniond qi = q_.conjugate();
        return Pose(qi, qi * (-t_));
    }

private:
    Eigen::Quaterniond q_;
    Eigen::Vector3d t_;
};

/// Geodesic distance between two orientations in degrees, in [0, 180].
/// Insensitive to quaternion sign; inputs are normalized defensively.
inline double quat_geodesic_deg(const Eigen::Quaterniond& a, const Eigen::Quaterniond& b) {
    const double na = a.norm(), nb = b.norm();
    double d = std::abs(a.dot(b) / (na * nb));
    if (d > 1.0) d = 1.0;
    return 2.0 * std::acos(d) * 180.0 / M_PI;
}

}  // namespace pv
