// patchvote/render/rasterizer.hpp — z-buffered software rasterizer.
//
// Unlit vertex colors, perspective-correct depth/color interpolation,
// top-left fill rule with first-triangle-wins depth ties so outputs are
// bit-exact across runs.
#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "patchvote/core/image.hpp"
#include "patchvote/core/intrinsics.hpp"
#include "patchvote/core/pose.hpp"
#include "patchvote/core/viewpoints.hpp"
#include "patchvote/render/mesh.hpp"

namespace pv {

struct RenderedView {
    Image<Rgb8> color;
    Image<float> depth;         // meters, 0 = background
    Image<std::uint8_t> mask;   // 1 where depth > 0
    Pose pose;                  // object -> camera
    CameraIntrinsics intrinsics;

    RgbdFrame to_frame() const { return RgbdFrame{color, depth, intrinsics}; }
};

namespace raster_detail {

struct ClipVertex {
    Eigen::Vector3d pc;   // camera-frame position
    Eigen::Vector3d rgb;  // 0..255
};

constexpr double kNearPlane = 1e-4;

// Sutherland-Hodgman against z >= kNearPlane.
inline int clip_near(const ClipVertex in[3], ClipVertex out[4]) {
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        const ClipVertex& a = in[i];
        const ClipVertex& b = in[(i + 1) % 3];
        const bool ain = a.pc.z() >= kNearPlane;
        const bool bin = b.pc.z() >= kNearPlane;
        if (ain) out[n++] = a;
        if (ain != bin) {
            const double t = (kNearPlane - a.pc.z()) / (b.pc.z() - a.pc.z());
            out[n++] = {a.pc + t * (b.pc - a.pc), a.rgb + t * (b.rgb - a.rgb)};
        }
    }
    return n;
}

inline double edge_fn(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Fill rule: boundary pixels belong to top and left edges only. With the
// winding normalized so edge functions are >= 0 inside and image y growing
// downward, a top edge runs right-to-left and a left edge runs upward.
inline bool edge_accepts(double w, double ax, double ay, double bx, double by) {
    if (w > 0.0) return true;
    if (w < 0.0) return false;
    if (ay == by) return bx > ax;  // horizontal: top edge
    return by < ay;                // left edge
}

// Rasterizes one camera-space triangle into the buffers. `label` is written
// where the depth test passes (labels may be null).
inline void raster_triangle(const ClipVertex& v0, const ClipVertex& v1, const ClipVertex& v2,
                            const CameraIntrinsics& K, Image<float>& zbuf, Image<Rgb8>& color,
                            Image<std::uint32_t>* labels, std::uint32_t label) {
    Eigen::Vector2d s0 = project(v0.pc, K), s1 = project(v1.pc, K), s2 = project(v2.pc, K);
    const ClipVertex* a = &v0;
    const ClipVertex* b = &v1;
    const ClipVertex* c = &v2;

    double area2 = edge_fn(s0.x(), s0.y(), s1.x(), s1.y(), s2.x(), s2.y());
    if (area2 == 0.0) return;
    if (area2 < 0.0) {
        std::swap(s1, s2);
        std::swap(b, c);
        area2 = -area2;
    }

    const int xmin = std::max(0, static_cast<int>(std::ceil(std::min({s0.x(), s1.x(), s2.x()}))));
    const int xmax = std::min(zbuf.width() - 1,
                              static_cast<int>(std::floor(std::max({s0.x(), s1.x(), s2.x()}))));
    const int ymin = std::max(0, static_cast<int>(std::ceil(std::min({s0.y(), s1.y(), s2.y()}))));
    const int ymax = std::min(zbuf.height() - 1,
                              static_cast<int>(std::floor(std::max({s0.y(), s1.y(), s2.y()}))));
    if (xmin > xmax || ymin > ymax) return;

    const double iz0 = 1.0 / a->pc.z(), iz1 = 1.0 / b->pc.z(), iz2 = 1.0 / c->pc.z();
    const Eigen::Vector3d r0 = a->rgb * iz0, r1 = b->rgb * iz1, r2 = c->rgb * iz2;

    for (int py = ymin; py <= ymax; ++py) {
        for (int px = xmin; px <= xmax; ++px) {
            const double x = px, y = py;
            const double w0 = edge_fn(s1.x(), s1.y(), s2.x(), s2.y(), x, y);
            const double w1 = edge_fn(s2.x(), s2.y(), s0.x(), s0.y(), x, y);
            const double w2 = edge_fn(s0.x(), s0.y(), s1.x(), s1.y(), x, y);
            if (!edge_accepts(w0, s1.x(), s1.y(), s2.x(), s2.y())) continue;
            if (!edge_accepts(w1, s2.x(), s2.y(), s0.x(), s0.y())) continue;
            if (!edge_accepts(w2, s0.x(), s0.y(), s1.x(), s1.y())) continue;

            const double l0 = w0 / area2, l1 = w1 / area2, l2 = w2 / area2;
            const double inv_z = l0 * iz0 + l1 * iz1 + l2 * iz2;
            const float z = static_cast<float>(1.0 / inv_z);
            float& zref = zbuf.at(px, py);
            if (z >= zref) continue;  // ties keep the earlier triangle
            zref = z;

            const Eigen::Vector3d rgb = (l0 * r0 + l1 * r1 + l2 * r2) / inv_z;
            auto to_u8 = [](double v) {
                return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
            };
            color.at(px, py) = {to_u8(rgb.x()), to_u8(rgb.y()), to_u8(rgb.z())};
            if (labels) labels->at(px, py) = label;
        }
    }
}

inline void raster_mesh(const Mesh& mesh, const Pose& pose, const CameraIntrinsics& K,
                        Image<float>& zbuf, Image<Rgb8>& color, Image<std::uint32_t>* labels,
                        std::uint32_t label) {
    std::vector<Eigen::Vector3d> cam(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) cam[i] = pose(mesh.vertices[i]);

    auto to_rgb = [](const Rgb8& c) {
        return Eigen::Vector3d(c[0], c[1], c[2]);
    };
    for (const auto& t : mesh.triangles) {
        const ClipVertex tri[3] = {
            {cam[t[0]], to_rgb(mesh.colors[t[0]])},
            {cam[t[1]], to_rgb(mesh.colors[t[1]])},
            {cam[t[2]], to_rgb(mesh.colors[t[2]])},
        };
        if (tri[0].pc.z() < kNearPlane || tri[1].pc.z() < kNearPlane ||
            tri[2].pc.z() < kNearPlane) {
            ClipVertex poly[4];
            const int n = clip_near(tri, poly);
            for (int i = 1; i + 1 < n; ++i)
                raster_triangle(poly[0], poly[i], poly[i + 1], K, zbuf, color, labels, label);
        } else {
            raster_triangle(tri[0], tri[1], tri[2], K, zbuf, color, labels, label);
        }
    }
}

inline void finish_depth(Image<float>& zbuf, Image<std::uint8_t>* mask) {
    for (int y = 0; y < zbuf.height(); ++y)
        for (int x = 0; x < zbuf.width(); ++x) {
            float& z = zbuf.at(x, y);
            const bool hit = z != std::numeric_limits<float>::infinity();
            if (!hit) z = 0.0f;
            if (mask) mask->at(x, y) = hit ? 1 : 0;
        }
}

}  // namespace raster_detail

/// Renders a mesh under an object->camera pose. A mesh entirely behind the
/// camera yields an empty view, not an error.
inline RenderedView render(const Mesh& mesh, const Pose& pose, const CameraIntrinsics& K) {
    K.require_valid();
    RenderedView view;
    view.pose = pose;
    view.intrinsics = K;
    view.color = Image<Rgb8>(K.width, K.height, Rgb8{0, 0, 0});
    view.depth = Image<float>(K.width, K.height, std::numeric_limits<float>::infinity());
    view.mask = Image<std::uint8_t>(K.width, K.height, 0);
    raster_detail::raster_mesh(mesh, pose, K, view.depth, view.color, nullptr, 0);
    raster_detail::finish_depth(view.depth, &view.mask);
    return view;
}

/// Renders every view of the set in order; output order is deterministic.
inline std::vector<RenderedView> render_viewset(const Mesh& mesh, const ViewpointSet& views,
                                                const CameraIntrinsics& K) {
    std::vector<RenderedView> out;
    out.reserve(views.views.size());
    for (const auto& pose : views.views) out.push_back(render(mesh, pose, K));
    return out;
}

/// One object instance inside a composed scene.
struct SceneObject {
    std::uint32_t id = 0;  // 0 is reserved for background / unlabeled geometry
    const Mesh* mesh = nullptr;
    Pose pose;
};

struct SceneRender {
    RgbdFrame frame;
    Image<std::uint32_t> labels;  // object id per pixel, 0 = background
};

/// Renders several posed meshes into one z-buffered frame.
inline SceneRender render_scene(const std::vector<SceneObject>& objects,
                                const CameraIntrinsics& K) {
    K.require_valid();
    SceneRender out;
    out.frame.intrinsics = K;
    out.frame.color = Image<Rgb8>(K.width, K.height, Rgb8{0, 0, 0});
    out.frame.depth = Image<float>(K.width, K.height, std::numeric_limits<float>::infinity());
    out.labels = Image<std::uint32_t>(K.width, K.height, 0);
    for (const auto& obj : objects)
        raster_detail::raster_mesh(*obj.mesh, obj.pose, K, out.frame.depth, out.frame.color,
                                   &out.labels, obj.id);
    raster_detail::finish_depth(out.frame.depth, nullptr);
    return out;
}

}  // namespace pv
