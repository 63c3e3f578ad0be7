// Shared test utilities: synthetic frames and analytic geometry oracles.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "patchvote/core/image.hpp"
#include "patchvote/core/intrinsics.hpp"
#include "patchvote/core/pose.hpp"
#include "patchvote/core/rng.hpp"

namespace pvtest {

inline pv::CameraIntrinsics test_K() { return pv::default_intrinsics(); }

/// Frame filled with constant depth and color.
inline pv::RgbdFrame flat_frame(const pv::CameraIntrinsics& K, float depth, pv::Rgb8 color) {
    pv::RgbdFrame f;
    f.intrinsics = K;
    f.color = pv::Image<pv::Rgb8>(K.width, K.height, color);
    f.depth = pv::Image<float>(K.width, K.height, depth);
    return f;
}

/// Ray-box intersection (slab method) against an axis-aligned box of half
/// extent h centered at the origin. Ray starts at `origin` with direction
/// `dir` (need not be unit). Returns entry parameter t, or nullopt on miss.
inline std::optional<double> ray_box_enter(const Eigen::Vector3d& origin,
                                           const Eigen::Vector3d& dir, double h) {
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (dir[a] == 0.0) {
            if (std::abs(origin[a]) > h) return std::nullopt;
            continue;
        }
        double t0 = (-h - origin[a]) / dir[a];
        double t1 = (h - origin[a]) / dir[a];
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
    }
    if (tmax < tmin) return std::nullopt;
    return tmin;
}

/// Signed distance from a point to an origin-centered axis-aligned box.
inline double box_sdf(const Eigen::Vector3d& p, double h) {
    const Eigen::Vector3d q = p.cwiseAbs() - Eigen::Vector3d::Constant(h);
    const Eigen::Vector3d outside = q.cwiseMax(0.0);
    const double inside = std::min(q.maxCoeff(), 0.0);
    return outside.norm() + inside;
}

}  // namespace pvtest
