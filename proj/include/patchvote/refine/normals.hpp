// patchvote/refine/normals.hpp — normals from depth by central differences.
#pragma once

#include <Eigen/Core>
#include <optional>

#include "patchvote/core/image.hpp"
#include "patchvote/core/intrinsics.hpp"

namespace pv {

/// Surface normal at pixel (x,y) from central differences on the depth map,
/// oriented toward the camera. Invalid neighbors or depth discontinuities
/// (default 5 cm) reject the estimate.
inline std::optional<Eigen::Vector3d> depth_normal(const Image<float>& depth,
                                                   const CameraIntrinsics& K, int x, int y,
                                                   double max_jump = 0.05) {
    if (x < 1 || y < 1 || x >= depth.width() - 1 || y >= depth.height() - 1) return std::nullopt;
    const float dc = depth.at(x, y);
    const float dl = depth.at(x - 1, y), dr = depth.at(x + 1, y);
    const float du = depth.at(x, y - 1), dd = depth.at(x, y + 1);
    if (!(dc > 0) || !(dl > 0) || !(dr > 0) || !(du > 0) || !(dd > 0)) return std::nullopt;
    if (std::abs(dl - dc) > max_jump || std::abs(dr - dc) > max_jump ||
        std::abs(du - dc) > max_jump || std::abs(dd - dc) > max_jump)
        return std::nullopt;

    const Eigen::Vector3d px = backproject(x + 1, y, dr, K) - backproject(x - 1, y, dl, K);
    const Eigen::Vector3d py = backproject(x, y + 1, dd, K) - backproject(x, y - 1, du, K);
    Eigen::Vector3d n = px.cross(py);
    const double norm = n.norm();
    if (norm < 1e-12) return std::nullopt;
    n /= norm;
    // Face the camera.
    if (n.dot(backproject(x, y, dc, K)) > 0) n = -n;
    return n;
}

}  // namespace pv
