// patchvote/patch/augment.hpp — training-time patch augmentation:
// random flips and color channel permutations. Depth flips with the image
// but is never permuted.
#pragma once

#include <array>
#include <cstdint>

#include "patchvote/core/rng.hpp"
#include "patchvote/patch/patch.hpp"

namespace pv {

struct AugmentOps {
    bool hflip = false;
    bool vflip = false;
    int color_perm = 0;  // index into kColorPerms
};

/// The six permutations of (R,G,B). Output channel c reads input channel
/// kColorPerms[perm][c].
inline constexpr std::array<std::array<int, 3>, 6> kColorPerms = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0},
}};

inline Patch apply_augment(const Patch& in, const AugmentOps& ops) {
    Patch out = in;
    const int n = Patch::kSize;
    for (int c = 0; c < 4; ++c) {
        const int src_c = c < 3 ? kColorPerms[ops.color_perm][c] : 3;
        for (int y = 0; y < n; ++y) {
            const int sy = ops.vflip ? n - 1 - y : y;
            for (int x = 0; x < n; ++x) {
                const int sx = ops.hflip ? n - 1 - x : x;
                out.at(c, y, x) = in.at(src_c, sy, sx);
            }
        }
    }
    return out;
}

inline AugmentOps draw_augment(Rng& rng) {
    AugmentOps ops;
    ops.hflip = rng.uniform() < 0.5;
    ops.vflip = rng.uniform() < 0.5;
    ops.color_perm = static_cast<int>(rng.uniform_index(6));
    return ops;
}

inline Patch augment(const Patch& in, std::uint64_t seed) {
    Rng rng(seed);
    return apply_augment(in, draw_augment(rng));
}

}  // namespace pv
