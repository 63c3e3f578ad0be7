// patchvote/vote/segmentation.hpp — segmentation maps from vote masks.
//
// Each supporting vote paints the synthetic foreground mask of its matched
// codebook patch into the patch's scene footprint; the per-object
// accumulators are then arg-maxed into a label image (0 = background).
#pragma once

#include <map>

#include "patchvote/codebook/codebook.hpp"
#include "patchvote/core/image.hpp"
#include "patchvote/vote/voting.hpp"

namespace pv {

inline Image<std::uint32_t> segmentation_map(const std::vector<Hypothesis>& hypotheses,
                                             const std::vector<VoteInstance>& votes,
                                             const Codebook& codebook, int width, int height) {
    std::map<std::uint32_t, Image<float>> accum;

    for (const Hypothesis& hyp : hypotheses) {
        auto it = accum.find(hyp.object_id);
        if (it == accum.end())
            it = accum.emplace(hyp.object_id, Image<float>(width, height, 0.0f)).first;
        Image<float>& acc = it->second;

        for (std::uint32_t vi : hyp.support) {
            const VoteInstance& vote = votes[vi];
            const Mask32& mask = codebook.entry(vote.entry_index).fg_mask;
            const double sx = vote.footprint_px, sy = vote.footprint_py;
            const int x0 = std::max(0, static_cast<int>(std::ceil(vote.source_pixel.x() - sx / 2)));
            const int x1 = std::min(width - 1,
                                    static_cast<int>(std::floor(vote.source_pixel.x() + sx / 2)));
            const int y0 = std::max(0, static_cast<int>(std::ceil(vote.source_pixel.y() - sy / 2)));
            const int y1 = std::min(height - 1,
                                    static_cast<int>(std::floor(vote.source_pixel.y() + sy / 2)));
            for (int y = y0; y <= y1; ++y) {
                // Nearest-neighbor lookup into the 32x32 mask.
                const int my = std::clamp(
                    static_cast<int>((y - (vote.source_pixel.y() - sy / 2)) / sy * 32), 0, 31);
                for (int x = x0; x <= x1; ++x) {
                    const int mx = std::clamp(
                        static_cast<int>((x - (vote.source_pixel.x() - sx / 2)) / sx * 32), 0, 31);
                    if (mask32_get(mask, my, mx))
                        acc.at(x, y) += static_cast<float>(vote.weight);
                }
            }
        }
    }

    Image<std::uint32_t> labels(width, height, 0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            float best = 0.0f;
            std::uint32_t best_id = 0;
            for (const auto& [id, acc] : accum)
                if (acc.at(x, y) > best) {
                    best = acc.at(x, y);
                    best_id = id;
                }
            labels.at(x, y) = best_id;
        }
    return labels;
}

}  // namespace pv
