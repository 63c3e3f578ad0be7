// patchvote/core/intrinsics.hpp — pinhole camera model.
#pragma once

#include <Eigen/Core>

#include "patchvote/core/errors.hpp"

namespace pv {

struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    bool valid() const {
        return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 && cx >= 0.0 &&
               cx < static_cast<double>(width) && cy >= 0.0 && cy < static_cast<double>(height);
    }

    void require_valid() const {
        if (!valid()) throw ConfigError("invalid camera intrinsics");
    }
};

/// 640x480 camera used for codebook rendering unless configured otherwise.
inline CameraIntrinsics default_intrinsics() {
    return CameraIntrinsics{575.0, 575.0, 320.0, 240.0, 640, 480};
}

/// Pixel (u,v) with metric depth z to a camera-frame 3D point.
inline Eigen::Vector3d backproject(double u, double v, double z, const CameraIntrinsics& K) {
    if (!(z > 0.0)) throw InvalidDepthError("backproject: depth must be positive");
    return {(u - K.cx) * z / K.fx, (v - K.cy) * z / K.fy, z};
}

/// Camera-frame point to pixel coordinates. The point must be in front of the camera.
inline Eigen::Vector2d project(const Eigen::Vector3d& p, const CameraIntrinsics& K) {
    if (!(p.z() > 0.0)) throw InvalidDepthError("project: point behind camera");
    return {K.fx * p.x() / p.z() + K.cx, K.fy * p.y() / p.z() + K.cy};
}

}  // namespace pv
