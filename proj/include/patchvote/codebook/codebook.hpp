// patchvote/codebook/codebook.hpp — synthetic-view vote codebooks.
//
// Every entry pairs a descriptor with a local vote: the offset from the
// patch 3D center point to the object centroid and the object orientation,
// both in the view camera frame, plus the patch foreground mask.
#pragma once

#include <Eigen/Geometry>
#include <map>
#include <vector>

#include "patchvote/codebook/kdforest.hpp"
#include "patchvote/core/pose.hpp"
#include "patchvote/net/regressor.hpp"
#include "patchvote/patch/sampling.hpp"
#include "patchvote/render/rasterizer.hpp"

namespace pv {

struct LocalVote {
    Eigen::Vector3f offset;          // patch center -> object centroid, camera frame
    Eigen::Quaternionf orientation;  // object -> camera, unit, w >= 0
};

struct CodebookEntry {
    LocalVote vote;
    Mask32 fg_mask{};
    std::uint32_t object_id = 0;
};

enum class KnnMode { Exact, Approx };

class Codebook {
public:
    Codebook() = default;
    explicit Codebook(int F) : F_(F) {}

    int feature_dim() const { return F_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const CodebookEntry& entry(std::size_t i) const { return entries_[i]; }
    const float* descriptor(std::size_t i) const { return descriptors_.data() + i * F_; }

    void add(const float* descriptor, const CodebookEntry& entry) {
        descriptors_.insert(descriptors_.end(), descriptor, descriptor + F_);
        entries_.push_back(entry);
        entries_.back().vote.orientation =
            canonical(entries_.back().vote.orientation.normalized().cast<double>())
                .cast<float>();
        index_built_ = false;
    }

    void rebuild_index(const KdForest::Params& params = KdForest::Params()) {
        index_.build(descriptors_.data(), entries_.size(), F_, params);
        index_built_ = true;
    }
    bool index_built() const { return index_built_; }

    /// k nearest entries by Euclidean descriptor distance, ascending.
    std::vector<KnnNeighbor> knn(const float* query, int k, KnnMode mode) const {
        if (k < 1) throw ConfigError("knn: k must be >= 1");
        if (entries_.empty()) return {};
        if (mode == KnnMode::Exact) return index_.knn_exact(query, k);
        if (!index_built_) throw ConfigError("knn: approximate index not built");
        return index_.knn_approx(query, k);
    }

    /// Union of codebooks; entries keep object ids, index is rebuilt.
    static Codebook merge(const std::vector<const Codebook*>& books) {
        if (books.empty()) throw ConfigError("merge: no codebooks");
        Codebook out(books.front()->F_);
        for (const Codebook* book : books) {
            if (book->F_ != out.F_)
                throw ConfigError("merge: feature dimension mismatch");
            out.descriptors_.insert(out.descriptors_.end(), book->descriptors_.begin(),
                                    book->descriptors_.end());
            out.entries_.insert(out.entries_.end(), book->entries_.begin(), book->entries_.end());
        }
        out.rebuild_index();
        return out;
    }

private:
    int F_ = 0;
    std::vector<float> descriptors_;  // size() * F_, row-major
    std::vector<CodebookEntry> entries_;
    KdForest index_;
    bool index_built_ = false;

    friend Codebook load_codebook(const std::string&);
};

/// Renders the mesh over the view set, samples foreground patches, encodes
/// them and stores one entry per patch. Entry order follows view order, then
/// row-major grid order.
inline Codebook build_codebook(const Mesh& mesh, std::uint32_t object_id,
                               const ViewpointSet& views, const Regressor& regressor,
                               const PatchConfig& cfg, const CameraIntrinsics& K) {
    if (views.views.empty()) throw ConfigError("build_codebook: empty view set");
    Codebook book(regressor.feature_dim());

    for (const Pose& pose : views.views) {
        const RenderedView view = render(mesh, pose, K);
        const auto view_patches = sample_view_patches(view, cfg);
        if (view_patches.empty()) continue;

        std::vector<Patch> patches;
        patches.reserve(view_patches.size());
        for (const auto& vp : view_patches) patches.push_back(vp.patch);
        const Eigen::MatrixXf descriptors = regressor.encode_batch(patches);

        const Eigen::Vector3d centroid_cam = pose(mesh.centroid);
        for (std::size_t i = 0; i < view_patches.size(); ++i) {
            CodebookEntry entry;
            entry.vote.offset = (centroid_cam - view_patches[i].patch.center_point).cast<float>();
            entry.vote.orientation = pose.rotation().cast<float>();
            entry.fg_mask = view_patches[i].fg_mask;
            entry.object_id = object_id;
            book.add(descriptors.col(static_cast<Eigen::Index>(i)).data(), entry);
        }
    }
    if (book.empty()) throw ConfigError("build_codebook: no patches extracted");
    book.rebuild_index();
    return book;
}

/// Distance threshold matched to the descriptor's scale, measured in the
/// actual retrieval regime: render each mesh at seeded poses that are not in
/// the codebook view set, take the 1-NN distance of every sampled patch, and
/// return quantile * margin. This is how a fixed threshold like "10" for one
/// descriptor is translated to another descriptor's distance scale.
inline double calibrate_tau_matching(const Codebook& book, const Regressor& regressor,
                                     const std::vector<const Mesh*>& meshes, double radius,
                                     const PatchConfig& cfg, const CameraIntrinsics& K,
                                     int poses_per_mesh = 3, std::uint64_t seed = 0xCA11B8,
                                     double quantile = 0.9, double margin = 1.1) {
    if (book.empty()) throw ConfigError("calibrate_tau_matching: empty codebook");
    Rng rng(seed);
    std::vector<float> dists;
    for (const Mesh* mesh : meshes) {
        for (int p = 0; p < poses_per_mesh; ++p) {
            const Pose pose(rng.quaternion(), {0, 0, radius});
            const auto view_patches = sample_view_patches(render(*mesh, pose, K), cfg);
            if (view_patches.empty()) continue;
            std::vector<Patch> patches;
            patches.reserve(view_patches.size());
            for (const auto& vp : view_patches) patches.push_back(vp.patch);
            const Eigen::MatrixXf descriptors = regressor.encode_batch(patches);
            for (Eigen::Index c = 0; c < descriptors.cols(); ++c) {
                const auto nn = book.knn(descriptors.col(c).data(), 1,
                                         book.index_built() ? KnnMode::Approx : KnnMode::Exact);
                if (!nn.empty()) dists.push_back(nn[0].dist);
            }
        }
    }
    if (dists.empty()) throw ConfigError("calibrate_tau_matching: no held-out patches");
    std::sort(dists.begin(), dists.end());
    const std::size_t pos =
        std::min(dists.size() - 1, static_cast<std::size_t>(quantile * dists.size()));
    return margin * dists[pos];
}

/// Cheaper variant using only the codebook itself: a multiple of a quantile
/// of nearest-other-entry distances. Underestimates the cross-view matching
/// scale (an entry's nearest neighbor is usually its grid neighbor in the
/// same view), so prefer calibrate_tau_matching when meshes are at hand.
inline double calibrate_tau(const Codebook& book, double quantile = 0.5, double scale = 3.0,
                            int max_samples = 512) {
    if (book.empty()) throw ConfigError("calibrate_tau: empty codebook");
    const KnnMode mode = book.index_built() ? KnnMode::Approx : KnnMode::Exact;
    const std::size_t n = book.size();
    const std::size_t stride = std::max<std::size_t>(1, n / max_samples);
    std::vector<float> dists;
    for (std::size_t i = 0; i < n; i += stride) {
        const auto neighbors = book.knn(book.descriptor(i), 2, mode);
        for (const auto& nb : neighbors)
            if (nb.index != i) {
                dists.push_back(nb.dist);
                break;
            }
    }
    if (dists.empty()) return 1.0;
    std::sort(dists.begin(), dists.end());
    const std::size_t pos = std::min(dists.size() - 1,
                                     static_cast<std::size_t>(quantile * dists.size()));
    return scale * dists[pos];
}

}  // namespace pv
