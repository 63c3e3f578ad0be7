// patchvote/patch/sampling.hpp — scale-invariant patch extraction.
//
// The pixel footprint of a patch is chosen from the center depth so that it
// always covers a fixed metric extent; depth values are de-meaned with the
// center depth, clamped to +-m and normalized, color is mapped to [-1,1],
// and the window is resampled to 32x32.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "patchvote/core/image.hpp"
#include "patchvote/core/intrinsics.hpp"
#include "patchvote/patch/patch.hpp"
#include "patchvote/render/rasterizer.hpp"

namespace pv {

/// Pixel side length of a patch of metric size m at depth z (size = m/z * f).
/// Uses fx; callers needing anisotropic pixels use fy for the vertical extent.
inline double patch_pixel_size(double z, const CameraIntrinsics& K, double m) {
    if (!(z > 0.0)) throw InvalidDepthError("patch_pixel_size: depth must be positive");
    return m / z * K.fx;
}

namespace sampling_detail {

// Clamping lookup = replicated border pixels.
inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

struct BilinearTap {
    int xa, xb, ya, yb;
    float wx, wy;  // fraction toward xb / yb
};

inline BilinearTap make_tap(double x, double y, int w, int h) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    BilinearTap tap;
    tap.wx = static_cast<float>(x - x0);
    tap.wy = static_cast<float>(y - y0);
    tap.xa = clampi(x0, 0, w - 1);
    tap.xb = clampi(x0 + 1, 0, w - 1);
    tap.ya = clampi(y0, 0, h - 1);
    tap.yb = clampi(y0 + 1, 0, h - 1);
    return tap;
}

template <typename F>
inline float sample_tap(const BilinearTap& t, F&& value_at) {
    const float v00 = value_at(t.xa, t.ya), v10 = value_at(t.xb, t.ya);
    const float v01 = value_at(t.xa, t.yb), v11 = value_at(t.xb, t.yb);
    return (v00 * (1.0f - t.wx) + v10 * t.wx) * (1.0f - t.wy) +
           (v01 * (1.0f - t.wx) + v11 * t.wx) * t.wy;
}

}  // namespace sampling_detail

/// Extracts the normalized patch centered at pixel (u,v). Returns nullopt when
/// the center depth is missing (the sample is skipped). Windows reaching past
/// the image replicate border pixels; depth holes inside the window become 0
/// after de-meaning.
inline std::optional<Patch> extract_patch(const RgbdFrame& frame, int u, int v,
                                          const PatchConfig& cfg) {
    const int w = frame.depth.width(), h = frame.depth.height();
    if (u < 0 || u >= w || v < 0 || v >= h) throw ConfigError("extract_patch: pixel out of bounds");

    const float z = frame.depth.at(u, v);
    if (!(z > 0.0f)) return std::nullopt;

    const double size_x = cfg.m / z * frame.intrinsics.fx;
    const double size_y = cfg.m / z * frame.intrinsics.fy;
    const int n = cfg.out_size;

    Patch patch;
    patch.center_point = backproject(u, v, z, frame.intrinsics);
    patch.source_pixel = {u, v};
    patch.valid = true;

    const float inv_m = static_cast<float>(1.0 / cfg.m);
    const float m_f = static_cast<float>(cfg.m);
    auto depth_value = [&](int x, int y) -> float {
        const float d = frame.depth.at(x, y);
        if (!(d > 0.0f)) return 0.0f;
        return std::clamp(d - z, -m_f, m_f) * inv_m;
    };
    constexpr float kColorScale = 2.0f / 255.0f;

    for (int oy = 0; oy < n; ++oy) {
        const double sy = v + ((oy + 0.5) / n - 0.5) * size_y;
        for (int ox = 0; ox < n; ++ox) {
            const double sx = u + ((ox + 0.5) / n - 0.5) * size_x;
            const auto tap = sampling_detail::make_tap(sx, sy, w, h);
            for (int c = 0; c < 3; ++c)
                patch.at(c, oy, ox) = sampling_detail::sample_tap(
                    tap, [&](int x, int y) { return frame.color.at(x, y)[c] * kColorScale - 1.0f; });
            patch.at(3, oy, ox) = sampling_detail::sample_tap(tap, depth_value);
        }
    }
    return patch;
}

/// Dense grid sampling over a frame; invalid-depth grid points are skipped.
/// Row-major visit order.
inline std::vector<Patch> sample_scene(const RgbdFrame& frame, const PatchConfig& cfg) {
    cfg.require_valid();
    std::vector<Patch> out;
    for (int v = 0; v < frame.depth.height(); v += cfg.grid_step)
        for (int u = 0; u < frame.depth.width(); u += cfg.grid_step)
            if (auto p = extract_patch(frame, u, v, cfg)) out.push_back(std::move(*p));
    return out;
}

struct ViewPatch {
    Patch patch;
    Mask32 fg_mask;  // nearest-resampled foreground bits at patch resolution
};

/// Like sample_scene over a rendered view, but only keeps patches whose
/// foreground fraction reaches cfg.fg_min_fraction; also emits the
/// patch-resolution foreground mask. The mask test runs before the (more
/// expensive) resampling.
inline std::vector<ViewPatch> sample_view_patches(const RenderedView& view,
                                                  const PatchConfig& cfg) {
    cfg.require_valid();
    const RgbdFrame frame = view.to_frame();
    const int w = frame.depth.width(), h = frame.depth.height();
    const int n = cfg.out_size;
    std::vector<ViewPatch> out;

    for (int v = 0; v < h; v += cfg.grid_step) {
        for (int u = 0; u < w; u += cfg.grid_step) {
            const float z = frame.depth.at(u, v);
            if (!(z > 0.0f)) continue;
            const double size_x = cfg.m / z * frame.intrinsics.fx;
            const double size_y = cfg.m / z * frame.intrinsics.fy;

            Mask32 mask{};
            int fg = 0;
            for (int oy = 0; oy < n; ++oy) {
                const int sy = sampling_detail::clampi(
                    static_cast<int>(std::lround(v + ((oy + 0.5) / n - 0.5) * size_y)), 0, h - 1);
                for (int ox = 0; ox < n; ++ox) {
                    const int sx = sampling_detail::clampi(
                        static_cast<int>(std::lround(u + ((ox + 0.5) / n - 0.5) * size_x)), 0,
                        w - 1);
                    if (view.mask.at(sx, sy)) {
                        mask32_set(mask, oy, ox, true);
                        ++fg;
                    }
                }
            }
            if (fg < cfg.fg_min_fraction * n * n) continue;

            auto p = extract_patch(frame, u, v, cfg);
            if (!p) continue;
            out.push_back(ViewPatch{std::move(*p), mask});
        }
    }
    return out;
}

}  // namespace pv
