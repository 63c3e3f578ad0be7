// patchvote/refine/verify.hpp — depth/normal hypothesis verification and
// final detection selection.
#pragma once

#include <algorithm>
#include <vector>

#include "patchvote/refine/icp.hpp"
#include "patchvote/vote/voting.hpp"

namespace pv {

struct VerifiedDetection {
    Hypothesis hypothesis;            // pose refined when ICP succeeded
    double depth_inlier_frac = 0.0;
    double mean_normal_angle_deg = 180.0;
    bool accepted = false;
    bool refined = false;
};

/// Renders the mesh at the pose and checks it against the scene: the depth
/// check needs enough rendered pixels to agree with the scene depth, the
/// normal check compares central-difference normals over those inliers.
/// Deterministic and pure.
inline VerifiedDetection verify(const Mesh& mesh, const Pose& pose, const RgbdFrame& frame,
                                const VerifyParams& params) {
    params.require_valid();
    VerifiedDetection out;
    out.hypothesis.pose = pose;
    out.hypothesis.centroid = pose(mesh.centroid);

    const RenderedView view = render(mesh, pose, frame.intrinsics);
    long rendered = 0, inliers = 0;
    double angle_sum = 0.0;
    long angle_count = 0;
    for (int y = 0; y < view.depth.height(); ++y)
        for (int x = 0; x < view.depth.width(); ++x) {
            const float dr = view.depth.at(x, y);
            if (!(dr > 0)) continue;
            ++rendered;
            const float ds = frame.depth.at(x, y);
            if (!(ds > 0) || std::abs(dr - ds) > params.depth_inlier_tol) continue;
            ++inliers;
            const auto nr = depth_normal(view.depth, frame.intrinsics, x, y);
            const auto ns = depth_normal(frame.depth, frame.intrinsics, x, y);
            if (nr && ns) {
                const double c = std::clamp(nr->dot(*ns), -1.0, 1.0);
                angle_sum += std::acos(c) * 180.0 / M_PI;
                ++angle_count;
            }
        }

    out.depth_inlier_frac = rendered > 0 ? static_cast<double>(inliers) / rendered : 0.0;
    out.mean_normal_angle_deg = angle_count > 0 ? angle_sum / angle_count : 180.0;
    out.accepted = out.depth_inlier_frac >= params.min_depth_inlier_frac &&
                   out.mean_normal_angle_deg <= params.normal_max_angle_deg;
    return out;
}

/// ICP + verification for one hypothesis. A failed refinement passes the
/// hypothesis through unrefined; the checks then reject it on their own
/// terms.
inline VerifiedDetection refine_and_verify(const Mesh& mesh, const Hypothesis& hyp,
                                           const RgbdFrame& frame, const VerifyParams& params) {
    const IcpResult icp = icp_refine(mesh, hyp.pose, frame, params);
    VerifiedDetection out = verify(mesh, icp.failed ? hyp.pose : icp.pose, frame, params);
    out.refined = !icp.failed;
    out.hypothesis.object_id = hyp.object_id;
    out.hypothesis.score = hyp.score;
    out.hypothesis.support = hyp.support;
    return out;
}

/// Keeps accepted detections; among same-object detections whose centroids
/// lie within the suppression radius, the geometrically best fitting one
/// (highest depth inlier fraction) survives.
inline std::vector<VerifiedDetection> select_detections(
    const std::vector<VerifiedDetection>& verified, double nms_radius = 0.05) {
    std::vector<const VerifiedDetection*> accepted;
    for (const auto& det : verified)
        if (det.accepted) accepted.push_back(&det);
    std::stable_sort(accepted.begin(), accepted.end(),
                     [](const VerifiedDetection* a, const VerifiedDetection* b) {
                         if (a->depth_inlier_frac != b->depth_inlier_frac)
                             return a->depth_inlier_frac > b->depth_inlier_frac;
                         return a->hypothesis.score > b->hypothesis.score;
                     });

    std::vector<VerifiedDetection> kept;
    for (const VerifiedDetection* det : accepted) {
        bool suppressed = false;
        for (const auto& k : kept)
            if (k.hypothesis.object_id == det->hypothesis.object_id &&
                (k.hypothesis.centroid - det->hypothesis.centroid).norm() < nms_radius) {
                suppressed = true;
                break;
            }
        if (!suppressed) kept.push_back(*det);
    }
    return kept;
}

}  // namespace pv
