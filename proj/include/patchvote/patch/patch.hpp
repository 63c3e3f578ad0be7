// patchvote/patch/patch.hpp — normalized scale-invariant RGB-D patch.
#pragma once

#include <Eigen/Core>
#include <array>

#include "patchvote/core/errors.hpp"

namespace pv {

struct PatchConfig {
    double m = 0.05;              // metric half-extent, meters
    int out_size = 32;            // fixed output resolution
    int grid_step = 8;            // sampling stride in pixels
    double fg_min_fraction = 0.5;  // codebook patches: min foreground share

    void require_valid() const {
        if (!(m > 0.0)) throw ConfigError("patch: m must be positive");
        if (out_size != 32) throw ConfigError("patch: out_size is fixed at 32");
        if (grid_step < 1) throw ConfigError("patch: grid_step must be >= 1");
        if (fg_min_fraction < 0.0 || fg_min_fraction > 1.0)
            throw ConfigError("patch: fg_min_fraction must be in [0,1]");
    }
};

/// 4x32x32 patch, planar channel order R,G,B,D, all values in [-1,1].
struct Patch {
    static constexpr int kSize = 32;
    static constexpr int kChannels = 4;
    static constexpr int kValues = kChannels * kSize * kSize;

    std::array<float, kValues> data{};
    Eigen::Vector3d center_point{0, 0, 0};  // camera frame, meters
    Eigen::Vector2i source_pixel{0, 0};
    bool valid = false;

    float& at(int c, int y, int x) { return data[(c * kSize + y) * kSize + x]; }
    float at(int c, int y, int x) const { return data[(c * kSize + y) * kSize + x]; }
};

/// 32x32 bitmask packed row-major, LSB first: bit (y*32+x) of the mask.
using Mask32 = std::array<std::uint8_t, 128>;

inline bool mask32_get(const Mask32& m, int y, int x) {
    const int bit = y * 32 + x;
    return (m[bit >> 3] >> (bit & 7)) & 1;
}

inline void mask32_set(Mask32& m, int y, int x, bool v) {
    const int bit = y * 32 + x;
    if (v)
        m[bit >> 3] |= static_cast<std::uint8_t>(1u << (bit & 7));
    else
        m[bit >> 3] &= static_cast<std::uint8_t>(~(1u << (bit & 7)));
}

inline int mask32_popcount(const Mask32& m) {
    int n = 0;
    for (auto b : m) n += __builtin_popcount(b);
    return n;
}

}  // namespace pv
