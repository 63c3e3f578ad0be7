// patchvote/vote/filter.hpp — three-stage vote filtering.
//
// Stage 1: project vote centroids into a 2D cell grid and accumulate weights.
// Stage 2: suppress cells with too few votes, smooth with a 3x3 triangle
//          kernel, extract strict 8-neighborhood maxima.
// Stage 3: each maximum collects the votes of its 3x3 cell neighborhood and
//          runs flat-kernel mean shift, first in translation, then over
//          sign-aligned quaternions.
// Votes are processed per object; modes merge when they converge together.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "patchvote/core/intrinsics.hpp"
#include "patchvote/vote/voting.hpp"

namespace pv {

namespace filter_detail {

struct CellGrid {
    int w = 0, h = 0;
    std::vector<double> weight;
    std::vector<int> count;
    std::vector<std::vector<std::uint32_t>> votes;  // vote indices per cell

    int index(int cx, int cy) const { return cy * w + cx; }
};

inline double smoothed_at(const std::vector<double>& m, int w, int h, int x, int y) {
    // Separable [1,2,1]/4 per axis, zero padding.
    auto at = [&](int xx, int yy) -> double {
        if (xx < 0 || xx >= w || yy < 0 || yy >= h) return 0.0;
        return m[yy * w + xx];
    };
    double acc = 0.0;
    const double kx[3] = {0.25, 0.5, 0.25};
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) acc += kx[dx + 1] * kx[dy + 1] * at(x + dx, y + dy);
    return acc;
}

/// Weighted flat-kernel mean shift over 3D points.
inline Eigen::Vector3d mean_shift_translation(const std::vector<VoteInstance>& votes,
                                              const std::vector<std::uint32_t>& idx,
                                              Eigen::Vector3d seed, const VoteParams& p) {
    Eigen::Vector3d y = seed;
    for (int it = 0; it < p.ms_max_iters; ++it) {
        Eigen::Vector3d num = Eigen::Vector3d::Zero();
        double den = 0.0;
        for (std::uint32_t i : idx) {
            const VoteInstance& v = votes[i];
            if ((v.centroid - y).norm() <= p.ms_trans_radius) {
                num += v.weight * v.centroid;
                den += v.weight;
            }
        }
        if (den == 0.0) {
            // Re-seed at the strongest collected vote.
            const auto best = std::max_element(idx.begin(), idx.end(),
                                               [&](std::uint32_t a, std::uint32_t b) {
                                                   return votes[a].weight < votes[b].weight;
                                               });
            if (best == idx.end()) return y;
            y = votes[*best].centroid;
            continue;
        }
        const Eigen::Vector3d next = num / den;
        const double shift = (next - y).norm();
        y = next;
        if (shift < p.ms_trans_eps) break;
    }
    return y;
}

/// Weighted flat-kernel mean shift over unit quaternions: sign-align members
/// to the estimate, average components, renormalize.
inline Eigen::Quaterniond mean_shift_rotation(const std::vector<VoteInstance>& votes,
                                              const std::vector<std::uint32_t>& idx,
                                              Eigen::Quaterniond seed, const VoteParams& p) {
    Eigen::Quaterniond q = seed.normalized();
    for (int it = 0; it < p.ms_max_iters; ++it) {
        Eigen::Vector4d acc = Eigen::Vector4d::Zero();
        double den = 0.0;
        for (std::uint32_t i : idx) {
            const VoteInstance& v = votes[i];
            if (quat_geodesic_deg(q, v.orientation) > p.ms_rot_radius_deg) continue;
            const double sign = q.dot(v.orientation) < 0 ? -1.0 : 1.0;
            acc += sign * v.weight *
                   Eigen::Vector4d(v.orientation.w(), v.orientation.x(), v.orientation.y(),
                                   v.orientation.z());
            den += v.weight;
        }
        if (den == 0.0) break;
        Eigen::Quaterniond next(acc(0), acc(1), acc(2), acc(3));
        if (next.norm() < 1e-12) break;
        next.normalize();
        const double shift_deg = quat_geodesic_deg(q, next);
        q = next;
        if (shift_deg < p.ms_rot_eps_deg) break;
    }
    return canonical(q);
}

}  // namespace filter_detail

/// Reduces raw votes to pose hypotheses (modes), strongest first.
inline std::vector<Hypothesis> filter_votes(const std::vector<VoteInstance>& votes,
                                            const CameraIntrinsics& K, const VoteParams& params,
                                            const ObjectCentroids& centroids) {
    using namespace filter_detail;
    params.require_valid();
    K.require_valid();

    // Deterministic object order.
    std::vector<std::uint32_t> object_ids;
    for (const auto& v : votes) object_ids.push_back(v.object_id);
    std::sort(object_ids.begin(), object_ids.end());
    object_ids.erase(std::unique(object_ids.begin(), object_ids.end()), object_ids.end());

    std::vector<Hypothesis> modes;

    for (std::uint32_t object_id : object_ids) {
        CellGrid grid;
        grid.w = (K.width + params.cell_px - 1) / params.cell_px;
        grid.h = (K.height + params.cell_px - 1) / params.cell_px;
        grid.weight.assign(static_cast<std::size_t>(grid.w) * grid.h, 0.0);
        grid.count.assign(grid.weight.size(), 0);
        grid.votes.assign(grid.weight.size(), {});

        for (std::uint32_t i = 0; i < votes.size(); ++i) {
            const VoteInstance& v = votes[i];
            if (v.object_id != object_id || !(v.centroid.z() > 0.0)) continue;
            const Eigen::Vector2d uv = project(v.centroid, K);
            const int cx = std::clamp(static_cast<int>(uv.x()) / params.cell_px, 0, grid.w - 1);
            const int cy = std::clamp(static_cast<int>(uv.y()) / params.cell_px, 0, grid.h - 1);
            const int cell = grid.index(cx, cy);
            grid.weight[cell] += v.weight;
            grid.count[cell] += 1;
            grid.votes[cell].push_back(i);
        }

        // Suppress under-populated cells before smoothing.
        std::vector<double> suppressed(grid.weight.size(), 0.0);
        for (std::size_t c = 0; c < grid.weight.size(); ++c)
            if (grid.count[c] >= params.min_cell_votes) suppressed[c] = grid.weight[c];

        for (int cy = 0; cy < grid.h; ++cy) {
            for (int cx = 0; cx < grid.w; ++cx) {
                const double center = smoothed_at(suppressed, grid.w, grid.h, cx, cy);
                if (center <= 0.0) continue;
                bool is_max = true;
                for (int dy = -1; dy <= 1 && is_max; ++dy)
                    for (int dx = -1; dx <= 1 && is_max; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        if (smoothed_at(suppressed, grid.w, grid.h, cx + dx, cy + dy) >= center)
                            is_max = false;
                    }
                if (!is_max) continue;

                // Collect votes from the 3x3 cell neighborhood.
                std::vector<std::uint32_t> collected;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || nx >= grid.w || ny < 0 || ny >= grid.h) continue;
                        const auto& cell_votes = grid.votes[grid.index(nx, ny)];
                        collected.insert(collected.end(), cell_votes.begin(), cell_votes.end());
                    }
                if (collected.empty()) continue;

                // Translational mean shift seeded at the weighted mean.
                Eigen::Vector3d seed = Eigen::Vector3d::Zero();
                double seed_den = 0.0;
                for (std::uint32_t i : collected) {
                    seed += votes[i].weight * votes[i].centroid;
                    seed_den += votes[i].weight;
                }
                seed /= seed_den;
                const Eigen::Vector3d center_pos =
                    mean_shift_translation(votes, collected, seed, params);

                // Rotation stage over the translationally in-kernel votes.
                std::vector<std::uint32_t> in_trans;
                for (std::uint32_t i : collected)
                    if ((votes[i].centroid - center_pos).norm() <= params.ms_trans_radius)
                        in_trans.push_back(i);
                if (in_trans.empty()) continue;

                // Seed the orientation stage at the strongest vote: votes at
                // one centroid often split into several orientation clusters
                // (discrete view sampling), and a blended average would land
                // between them where the flat kernel sees nothing.
                const VoteInstance& strongest = votes[*std::max_element(
                    in_trans.begin(), in_trans.end(), [&](std::uint32_t a, std::uint32_t b) {
                        return votes[a].weight < votes[b].weight;
                    })];
                const Eigen::Quaterniond orientation =
                    mean_shift_rotation(votes, in_trans, strongest.orientation, params);

                Hypothesis hyp;
                hyp.object_id = object_id;
                hyp.centroid = center_pos;
                hyp.score = 0.0;
                for (std::uint32_t i : in_trans)
                    if (quat_geodesic_deg(orientation, votes[i].orientation) <=
                        params.ms_rot_radius_deg) {
                        hyp.support.push_back(i);
                        hyp.score += votes[i].weight;
                    }
                if (static_cast<int>(hyp.support.size()) < params.min_cell_votes) continue;
                hyp.pose = pose_from_vote(orientation, center_pos,
                                          centroid_of(centroids, object_id));
                modes.push_back(std::move(hyp));
            }
        }
    }

    // Merge duplicate modes that converged to the same point.
    std::stable_sort(modes.begin(), modes.end(),
                     [](const Hypothesis& a, const Hypothesis& b) { return a.score > b.score; });
    std::vector<Hypothesis> merged;
    for (auto& mode : modes) {
        bool duplicate = false;
        for (const auto& kept : merged) {
            if (kept.object_id == mode.object_id &&
                (kept.centroid - mode.centroid).norm() < 0.5 * params.ms_trans_radius &&
                quat_geodesic_deg(kept.pose.rotation(), mode.pose.rotation()) <
                    0.5 * params.ms_rot_radius_deg) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) merged.push_back(std::move(mode));
    }
    return merged;
}

}  // namespace pv
