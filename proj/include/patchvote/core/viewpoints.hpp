// patchvote/core/viewpoints.hpp — icosahedron view sampling.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "patchvote/core/errors.hpp"
#include "patchvote/core/pose.hpp"

namespace pv {

/// Unit icosphere triangulation: icosahedron subdivided by edge midpoints,
/// every vertex projected back to the unit sphere.
struct IcoSphere {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> triangles;
};

inline IcoSphere make_icosphere(int subdivisions) {
    if (subdivisions < 0) throw ConfigError("icosphere: subdivisions must be >= 0");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    IcoSphere s;
    s.vertices = {
        {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (auto& v : s.vertices) v.normalize();
    s.triangles = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Eigen::Vector3d m = (s.vertices[a] + s.vertices[b]).normalized();
            int idx = static_cast<int>(s.vertices.size());
            s.vertices.push_back(m);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(s.triangles.size() * 4);
        for (const auto& t : s.triangles) {
            int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        s.triangles = std::move(next);
    }
    return s;
}

/// Cameras looking at the object-frame origin from sphere vertices, each
/// replicated over uniform in-plane rotation steps. Poses are object->camera.
struct ViewpointSet {
    std::vector<Pose> views;
    int vertex_count = 0;
    int inplane_steps = 1;
    double radius = 0.0;
};

/// Object->camera pose for a camera at `position` (object frame) whose
/// optical axis passes through the origin. +z forward, +y down in the image.
inline Pose lookat_origin(const Eigen::Vector3d& position) {
    const Eigen::Vector3d z = (-position).normalized();
    Eigen::Vector3d up(0.0, 0.0, 1.0);
    if (std::abs(z.dot(up)) > 0.99) up = Eigen::Vector3d(1.0, 0.0, 0.0);
    const Eigen::Vector3d x = up.cross(z).normalized();
    const Eigen::Vector3d y = z.cross(x);
    Eigen::Matrix3d R;
    R.row(0) = x.transpose();
    R.row(1) = y.transpose();
    R.row(2) = z.transpose();
    return Pose::from_matrix(R, -R * position);
}

inline ViewpointSet sample_icosahedron_views(int subdivisions, double radius, int inplane_steps) {
    if (!(radius > 0.0)) throw ConfigError("viewpoints: radius must be positive");
    if (inplane_steps < 1) throw ConfigError("viewpoints: inplane_steps must be >= 1");

    const IcoSphere sphere = make_icosphere(subdivisions);
    ViewpointSet set;
    set.vertex_count = static_cast<int>(sphere.vertices.size());
    set.inplane_steps = inplane_steps;
    set.radius = radius;
    set.views.reserve(sphere.vertices.size() * static_cast<std::size_t>(inplane_steps));

    for (const auto& v : sphere.vertices) {
        const Pose base = lookat_origin(v * radius);
        for (int i = 0; i < inplane_steps; ++i) {
            const double angle = 2.0 * M_PI * i / inplane_steps;
            const Pose inplane = Pose::from_axis_angle(Eigen::Vector3d::UnitZ(), angle);
            set.views.push_back(inplane * base);
        }
    }
    return set;
}

/// Camera position in the object frame for an object->camera pose.
inline Eigen::Vector3d camera_position(const Pose& view) {
    return view.inverse().translation();
}

}  // namespace pv
