// patchvote/refine/icp.hpp — projective ICP pose refinement.
//
// Each iteration re-renders the model at the current pose and associates
// every rendered foreground pixel with the scene depth at the same image
// coordinate. The small-angle point-to-plane (or point-to-point) system is
// solved for a twist update; step halving keeps the residual monotone.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "patchvote/refine/normals.hpp"
#include "patchvote/render/rasterizer.hpp"

namespace pv {

struct VerifyParams {
    int icp_max_iters = 15;
    bool icp_point_plane = true;      // off: point-to-point
    double assoc_max_dist = 0.02;     // meters, projective association gate
    double depth_inlier_tol = 0.02;   // meters, verification depth check
    double min_depth_inlier_frac = 0.65;
    double normal_max_angle_deg = 30.0;
    double min_valid_frac = 0.2;      // associations / rendered pixels at start

    void require_valid() const {
        if (icp_max_iters < 1 || assoc_max_dist <= 0 || depth_inlier_tol <= 0 ||
            min_depth_inlier_frac <= 0 || min_depth_inlier_frac > 1 ||
            normal_max_angle_deg <= 0 || min_valid_frac <= 0 || min_valid_frac > 1)
            throw ConfigError("verify params: values out of range");
    }
};

struct IcpResult {
    Pose pose;
    double residual = 0.0;  // RMS point-to-plane (or point) distance, meters
    bool failed = false;    // too few valid associations at the start
    int iterations = 0;
    std::vector<double> residual_history;
};

namespace icp_detail {

struct Association {
    Eigen::Vector3d model_point;  // rendered surface point, camera frame
    Eigen::Vector3d scene_point;
    Eigen::Vector3d normal;  // scene normal
    bool has_normal = false;
};

struct AssocStats {
    std::vector<Association> pairs;
    long rendered_pixels = 0;
};

inline AssocStats associate(const Mesh& mesh, const Pose& pose, const RgbdFrame& frame,
                            const VerifyParams& params, bool need_normals) {
    AssocStats stats;
    const RenderedView view = render(mesh, pose, frame.intrinsics);
    for (int y = 0; y < view.depth.height(); ++y)
        for (int x = 0; x < view.depth.width(); ++x) {
            const float dr = view.depth.at(x, y);
            if (!(dr > 0)) continue;
            ++stats.rendered_pixels;
            const float ds = frame.depth.at(x, y);
            if (!(ds > 0) || std::abs(dr - ds) > params.assoc_max_dist) continue;
            Association assoc;
            assoc.model_point = backproject(x, y, dr, frame.intrinsics);
            assoc.scene_point = backproject(x, y, ds, frame.intrinsics);
            if (need_normals) {
                const auto n = depth_normal(frame.depth, frame.intrinsics, x, y);
                if (!n) continue;  // point-to-plane needs the plane
                assoc.normal = *n;
                assoc.has_normal = true;
            }
            stats.pairs.push_back(assoc);
        }
    return stats;
}

inline double residual_of(const std::vector<Association>& pairs, bool point_plane) {
    if (pairs.empty()) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (const auto& a : pairs) {
        const Eigen::Vector3d diff = a.model_point - a.scene_point;
        const double r = point_plane ? a.normal.dot(diff) : diff.norm();
        acc += r * r;
    }
    return std::sqrt(acc / pairs.size());
}

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

struct NormalEquations {
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> b = Eigen::Matrix<double, 6, 1>::Zero();

    /// Gauss-Newton twist; lambda > 0 damps toward smaller steps.
    Eigen::Matrix<double, 6, 1> solve(double lambda = 0.0) const {
        Eigen::Matrix<double, 6, 6> M = A;
        if (lambda > 0.0) M += lambda * A.diagonal().asDiagonal().toDenseMatrix();
        return M.ldlt().solve(b);
    }
};

/// Builds the linearized rigid alignment moving the model points onto the
/// scene.
inline NormalEquations build_normal_equations(const std::vector<Association>& pairs,
                                              bool point_plane) {
    NormalEquations eq;
    for (const auto& a : pairs) {
        if (point_plane) {
            Eigen::Matrix<double, 6, 1> J;
            J.head<3>() = a.model_point.cross(a.normal);
            J.tail<3>() = a.normal;
            const double r = a.normal.dot(a.model_point - a.scene_point);
            eq.A += J * J.transpose();
            eq.b -= J * r;
        } else {
            // Three rows: d/dxi [ (I + [w]x) p + t - q ].
            Eigen::Matrix<double, 3, 6> J;
            J.block<3, 3>(0, 0) = -skew(a.model_point);
            J.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity();
            const Eigen::Vector3d r = a.model_point - a.scene_point;
            eq.A += J.transpose() * J;
            eq.b -= J.transpose() * r;
        }
    }
    return eq;
}

inline Pose apply_twist(const Eigen::Matrix<double, 6, 1>& xi, const Pose& pose) {
    const Eigen::Vector3d omega = xi.head<3>();
    const double angle = omega.norm();
    const Eigen::Quaterniond dq =
        angle < 1e-14 ? Eigen::Quaterniond::Identity()
                      : Eigen::Quaterniond(Eigen::AngleAxisd(angle, omega / angle));
    return Pose(dq, xi.tail<3>()) * pose;
}

}  // namespace icp_detail

/// Conditioning of the point-to-plane system at a pose: smallest-to-largest
/// eigenvalue ratio of the 6x6 information matrix, with rotations taken about
/// the object center and scaled to surface meters so the six axes are
/// commensurate. Near zero means some rigid motion is unobservable from the
/// visible geometry (e.g. a cube face-on sliding in its own plane); no
/// refinement algorithm can recover such a direction.
inline double pose_observability(const Mesh& mesh, const Pose& pose, const RgbdFrame& frame,
                                 const VerifyParams& params) {
    const auto stats = icp_detail::associate(mesh, pose, frame, params, true);
    if (stats.pairs.size() < 50) return 0.0;
    const Eigen::Vector3d center = pose(mesh.centroid);
    const double scale = mesh.diameter / 2.0;
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    for (const auto& a : stats.pairs) {
        Eigen::Matrix<double, 6, 1> J;
        J.head<3>() = (a.model_point - center).cross(a.normal) / scale;
        J.tail<3>() = a.normal;
        A += J * J.transpose();
    }
    A /= static_cast<double>(stats.pairs.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(A);
    return es.eigenvalues()(0) / es.eigenvalues()(5);
}

/// Refines pose0 against the frame. When fewer than min_valid_frac of the
/// rendered pixels find scene support at the start, the pose is passed
/// through with failed = true (verification will reject it).
inline IcpResult icp_refine(const Mesh& mesh, const Pose& pose0, const RgbdFrame& frame,
                            const VerifyParams& params) {
    using namespace icp_detail;
    params.require_valid();
    frame.require_consistent();

    IcpResult result;
    result.pose = pose0;

    AssocStats stats = associate(mesh, pose0, frame, params, params.icp_point_plane);
    if (stats.rendered_pixels == 0 ||
        static_cast<double>(stats.pairs.size()) / stats.rendered_pixels < params.min_valid_frac) {
        result.failed = true;
        result.residual = residual_of(stats.pairs, params.icp_point_plane);
        return result;
    }

    double residual = residual_of(stats.pairs, params.icp_point_plane);
    result.residual_history.push_back(residual);

    for (int iter = 0; iter < params.icp_max_iters; ++iter) {
        const NormalEquations eq = build_normal_equations(stats.pairs, params.icp_point_plane);

        // Candidate steps: full Gauss-Newton, halved, then damped. The first
        // whose re-rendered residual does not increase is accepted, which
        // keeps the recorded residual monotone.
        const Eigen::Matrix<double, 6, 1> gn = eq.solve();
        const Eigen::Matrix<double, 6, 1> trials[6] = {gn,           gn * 0.5,      gn * 0.25,
                                                       eq.solve(0.01), eq.solve(0.1), eq.solve(1.0)};
        Pose candidate;
        AssocStats cand_stats;
        double cand_residual = std::numeric_limits<double>::infinity();
        Eigen::Matrix<double, 6, 1> accepted_xi;
        bool accepted = false;
        for (const auto& xi : trials) {
            candidate = apply_twist(xi, result.pose);
            cand_stats = associate(mesh, candidate, frame, params, params.icp_point_plane);
            cand_residual = residual_of(cand_stats.pairs, params.icp_point_plane);
            if (cand_stats.pairs.size() >= 6 && cand_residual <= residual + 1e-12) {
                accepted = true;
                accepted_xi = xi;
                break;
            }
        }
        if (!accepted) break;

        const double step_trans = accepted_xi.tail<3>().norm();
        const double step_rot_deg = accepted_xi.head<3>().norm() * 180.0 / M_PI;
        result.pose = candidate;
        stats = std::move(cand_stats);
        residual = cand_residual;
        result.residual_history.push_back(residual);
        result.iterations = iter + 1;
        if (step_trans < 1e-5 && step_rot_deg < 0.01) break;
    }
    result.residual = residual;
    return result;
}

}  // namespace pv
