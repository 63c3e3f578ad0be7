// patchvote/vote/voting.hpp — constrained 6D vote casting.
//
// Retrieved neighbors vote only when their descriptor distance beats tau;
// each vote then places the object centroid at sample point + stored offset
// with weight e^{-distance}. Votes are exact functions of the sample and the
// matched entry, so input noise never corrupts a cast vote's geometry.
#pragma once

#include <Eigen/Geometry>
#include <cmath>
#include <map>
#include <vector>

#include "patchvote/codebook/codebook.hpp"
#include "patchvote/core/pose.hpp"

namespace pv {

struct VoteParams {
    int k = 3;                       // retrieved neighbors per sample
    double tau = 10.0;               // feature distance threshold
    int cell_px = 5;                 // vote-filter grid cell size
    int min_cell_votes = 3;          // suppress cells holding fewer votes
    double ms_trans_radius = 0.025;  // flat-kernel radius, meters
    double ms_rot_radius_deg = 7.0;  // flat-kernel radius, degrees
    int ms_max_iters = 50;
    double ms_trans_eps = 1e-4;      // meters
    double ms_rot_eps_deg = 0.05;
    bool exact_nn = false;

    void require_valid() const {
        if (k < 1 || tau < 0 || cell_px < 1 || min_cell_votes < 1 || ms_trans_radius <= 0 ||
            ms_rot_radius_deg <= 0 || ms_max_iters < 1 || ms_trans_eps <= 0 || ms_rot_eps_deg <= 0)
            throw ConfigError("vote params: all values must be positive");
    }
};

struct VoteInstance {
    Eigen::Vector3d centroid;         // voted object centroid, camera frame
    Eigen::Quaterniond orientation;   // object -> camera
    double weight = 0.0;              // e^{-feature distance}, in (0,1]
    std::uint32_t object_id = 0;
    std::uint32_t entry_index = 0;    // codebook entry that cast this vote
    Eigen::Vector2i source_pixel{0, 0};
    double footprint_px = 0.0;        // patch window in scene pixels
    double footprint_py = 0.0;
};

/// A pose hypothesis with its supporting votes (indices into the vote list).
struct Hypothesis {
    std::uint32_t object_id = 0;
    Pose pose;
    Eigen::Vector3d centroid{0, 0, 0};  // camera frame
    double score = 0.0;
    std::vector<std::uint32_t> support;
};

/// Mean of mesh vertices per object id; filter/top-N need it to convert a
/// voted centroid into a pose translation.
using ObjectCentroids = std::map<std::uint32_t, Eigen::Vector3d>;

inline const Eigen::Vector3d& centroid_of(const ObjectCentroids& centroids, std::uint32_t id) {
    auto it = centroids.find(id);
    if (it == centroids.end())
        throw ConfigError("unknown object id " + std::to_string(id) + " (no centroid registered)");
    return it->second;
}

inline Pose pose_from_vote(const Eigen::Quaterniond& orientation, const Eigen::Vector3d& centroid,
                           const Eigen::Vector3d& object_centroid) {
    return Pose(orientation, centroid - orientation * object_centroid);
}

/// Casts constrained votes for every sampled scene patch, in sample order,
/// neighbors ascending by distance.
inline std::vector<VoteInstance> cast_votes(const std::vector<Patch>& scene_patches,
                                            const Codebook& codebook, const Regressor& regressor,
                                            const VoteParams& params, const PatchConfig& patch_cfg,
                                            const CameraIntrinsics& K) {
    params.require_valid();
    if (codebook.feature_dim() != regressor.feature_dim())
        throw ConfigError("cast_votes: codebook F != regressor F");

    std::vector<VoteInstance> votes;
    if (scene_patches.empty() || codebook.empty()) return votes;

    const Eigen::MatrixXf descriptors = regressor.encode_batch(scene_patches);
    const KnnMode mode = params.exact_nn ? KnnMode::Exact : KnnMode::Approx;

    for (std::size_t s = 0; s < scene_patches.size(); ++s) {
        const Patch& patch = scene_patches[s];
        const auto neighbors =
            codebook.knn(descriptors.col(static_cast<Eigen::Index>(s)).data(), params.k, mode);
        for (const auto& nb : neighbors) {
            if (!(nb.dist < params.tau)) continue;
            const CodebookEntry& entry = codebook.entry(nb.index);
            VoteInstance vote;
            vote.centroid = patch.center_point + entry.vote.offset.cast<double>();
            vote.orientation = entry.vote.orientation.cast<double>();
            vote.weight = std::exp(-static_cast<double>(nb.dist));
            vote.object_id = entry.object_id;
            vote.entry_index = nb.index;
            vote.source_pixel = patch.source_pixel;
            vote.footprint_px = patch_cfg.m / patch.center_point.z() * K.fx;
            vote.footprint_py = patch_cfg.m / patch.center_point.z() * K.fy;
            votes.push_back(vote);
        }
    }
    return votes;
}

/// Promotes the N most confident votes to single-vote hypotheses (the
/// protocol that bypasses vote filtering). Ties keep the earlier vote.
inline std::vector<Hypothesis> top_n_votes(const std::vector<VoteInstance>& votes, int n,
                                           const ObjectCentroids& centroids) {
    if (n <= 0) throw std::invalid_argument("top_n_votes: N must be positive");
    std::vector<std::uint32_t> order(votes.size());
    for (std::size_t i = 0; i < votes.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return votes[a].weight > votes[b].weight;
    });
    if (order.size() > static_cast<std::size_t>(n)) order.resize(n);

    std::vector<Hypothesis> out;
    out.reserve(order.size());
    for (std::uint32_t idx : order) {
        const VoteInstance& vote = votes[idx];
        Hypothesis hyp;
        hyp.object_id = vote.object_id;
        hyp.centroid = vote.centroid;
        hyp.pose = pose_from_vote(vote.orientation, vote.centroid,
                                  centroid_of(centroids, vote.object_id));
        hyp.score = vote.weight;
        hyp.support = {idx};
        out.push_back(std::move(hyp));
    }
    return out;
}

}  // namespace pv
