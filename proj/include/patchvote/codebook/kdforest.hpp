// patchvote/codebook/kdforest.hpp — approximate k-NN over descriptor sets.
//
// Forest of randomized kd-trees with best-bin-first search under a shared
// leaf-visit budget. The contract is the recall bound measured by the tests,
// not a particular tree shape. Exact queries use a separate brute-force scan.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "patchvote/core/errors.hpp"
#include "patchvote/core/rng.hpp"

namespace pv {

struct KnnNeighbor {
    std::uint32_t index = 0;
    float dist = 0.0f;  // Euclidean
};

class KdForest {
public:
    struct Params {
        int trees = 4;
        int leaf_size = 16;
        int checks = 8192;  // point comparisons per approximate query
        std::uint64_t seed = 0x5EED;
    };

    KdForest() = default;

    /// `data` is row-major n x dim and must outlive the forest.
    void build(const float* data, std::size_t n, int dim) { build(data, n, dim, Params()); }

    void build(const float* data, std::size_t n, int dim, const Params& params) {
        data_ = data;
        n_ = n;
        dim_ = dim;
        params_ = params;
        trees_.assign(params.trees, Tree{});
        if (n == 0) return;
        Rng rng(params.seed);
        for (auto& tree : trees_) {
            tree.order.resize(n);
            for (std::size_t i = 0; i < n; ++i) tree.order[i] = static_cast<std::uint32_t>(i);
            tree.nodes.reserve(2 * n / params.leaf_size + 4);
            build_node(tree, 0, n, rng);
        }
    }

    bool empty() const { return n_ == 0; }
    std::size_t size() const { return n_; }

    std::vector<KnnNeighbor> knn_exact(const float* query, int k) const {
        ResultHeap heap(k);
        for (std::size_t i = 0; i < n_; ++i)
            heap.offer(static_cast<std::uint32_t>(i), sqdist(query, i));
        return heap.sorted();
    }

    std::vector<KnnNeighbor> knn_approx(const float* query, int k, int checks_override = -1) const {
        if (n_ == 0) return {};
        const int budget = checks_override > 0 ? checks_override : params_.checks;
        ResultHeap heap(k);

        // Per-thread dedup scratch: queries are concurrent-safe and O(1) to
        // reset (epoch stamping).
        static thread_local std::vector<std::uint32_t> stamp;
        static thread_local std::uint32_t epoch = 0;
        if (stamp.size() < n_) stamp.resize(n_, 0);
        if (++epoch == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            epoch = 1;
        }

        // (lower bound on distance, tree, node)
        using QueueEntry = std::tuple<float, std::uint32_t, std::uint32_t>;
        std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> frontier;
        for (std::uint32_t t = 0; t < trees_.size(); ++t)
            if (!trees_[t].nodes.empty()) frontier.emplace(0.0f, t, 0u);

        int checks = 0;
        while (!frontier.empty() && checks < budget) {
            auto [bound, t, node_idx] = frontier.top();
            frontier.pop();
            if (heap.full() && bound * bound >= heap.worst()) continue;
            const Tree& tree = trees_[t];
            std::uint32_t ni = node_idx;
            const float mindist = bound;
            while (true) {
                const Node& node = tree.nodes[ni];
                if (node.is_leaf()) {
                    for (std::uint32_t i = node.begin; i < node.end && checks < budget; ++i) {
                        const std::uint32_t p = tree.order[i];
                        if (stamp[p] == epoch) continue;
                        stamp[p] = epoch;
                        heap.offer(p, sqdist(query, p));
                        ++checks;
                    }
                    break;
                }
                const float diff = query[node.split_dim] - node.split_val;
                const std::uint32_t near = diff < 0 ? node.left : node.right;
                const std::uint32_t far = diff < 0 ? node.right : node.left;
                const float far_bound = std::max(mindist, std::abs(diff));
                if (!heap.full() || far_bound * far_bound < heap.worst())
                    frontier.emplace(far_bound, t, far);
                ni = near;
            }
        }
        return heap.sorted();
    }

private:
    struct Node {
        // Leaf when left == 0 (the root can never be a child).
        std::uint32_t left = 0, right = 0;
        int split_dim = 0;
        float split_val = 0.0f;
        std::uint32_t begin = 0, end = 0;
        bool is_leaf() const { return left == 0; }
    };

    struct Tree {
        std::vector<Node> nodes;
        std::vector<std::uint32_t> order;
    };

    class ResultHeap {
    public:
        explicit ResultHeap(int k) : k_(k) {}
        bool full() const { return static_cast<int>(items_.size()) >= k_; }
        float worst() const { return items_.front().second; }

        void offer(std::uint32_t index, float sq) {
            if (!full()) {
                items_.emplace_back(sq, index);
                std::push_heap(items_.begin(), items_.end(), cmp);
            } else if (sq < items_.front().first) {
                std::pop_heap(items_.begin(), items_.end(), cmp);
                items_.back() = {sq, index};
                std::push_heap(items_.begin(), items_.end(), cmp);
            }
        }

        std::vector<KnnNeighbor> sorted() {
            std::sort(items_.begin(), items_.end());
            std::vector<KnnNeighbor> out;
            out.reserve(items_.size());
            for (const auto& [sq, idx] : items_) out.push_back({idx, std::sqrt(sq)});
            return out;
        }

    private:
        // (squared distance, index); ties resolve to the lower index so
        // results are deterministic.
        static bool cmp(const std::pair<float, std::uint32_t>& a,
                        const std::pair<float, std::uint32_t>& b) {
            return a < b;
        }
        int k_;
        std::vector<std::pair<float, std::uint32_t>> items_;
    };

    float sqdist(const float* q, std::size_t i) const {
        const float* p = data_ + i * dim_;
        float acc = 0.0f;
        for (int d = 0; d < dim_; ++d) {
            const float diff = q[d] - p[d];
            acc += diff * diff;
        }
        return acc;
    }

    std::uint32_t build_node(Tree& tree, std::size_t begin, std::size_t end, Rng& rng) {
        const std::uint32_t idx = static_cast<std::uint32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (end - begin <= static_cast<std::size_t>(params_.leaf_size)) {
            tree.nodes[idx].begin = static_cast<std::uint32_t>(begin);
            tree.nodes[idx].end = static_cast<std::uint32_t>(end);
            return idx;
        }

        // Sampled per-dimension mean/variance; split on a random pick among
        // the top-5 variance dimensions at the sample mean.
        const std::size_t sample = std::min<std::size_t>(end - begin, 128);
        std::vector<double> mean(dim_, 0.0), var(dim_, 0.0);
        const std::size_t stride = std::max<std::size_t>(1, (end - begin) / sample);
        std::size_t used = 0;
        for (std::size_t i = begin; i < end; i += stride, ++used) {
            const float* p = data_ + static_cast<std::size_t>(tree.order[i]) * dim_;
            for (int d = 0; d < dim_; ++d) mean[d] += p[d];
        }
        for (int d = 0; d < dim_; ++d) mean[d] /= static_cast<double>(used);
        for (std::size_t i = begin; i < end; i += stride) {
            const float* p = data_ + static_cast<std::size_t>(tree.order[i]) * dim_;
            for (int d = 0; d < dim_; ++d) {
                const double diff = p[d] - mean[d];
                var[d] += diff * diff;
            }
        }
        int top[5] = {0, 0, 0, 0, 0};
        const int top_n = std::min(5, dim_);
        std::vector<int> dims(dim_);
        for (int d = 0; d < dim_; ++d) dims[d] = d;
        std::partial_sort(dims.begin(), dims.begin() + top_n, dims.end(),
                          [&](int a, int b) { return var[a] > var[b]; });
        for (int i = 0; i < top_n; ++i) top[i] = dims[i];
        const int split_dim = top[rng.uniform_index(top_n)];
        const float split_val = static_cast<float>(mean[split_dim]);

        auto mid_it = std::partition(
            tree.order.begin() + begin, tree.order.begin() + end,
            [&](std::uint32_t p) { return data_[p * static_cast<std::size_t>(dim_) + split_dim] <
                                          split_val; });
        std::size_t mid = static_cast<std::size_t>(mid_it - tree.order.begin());
        if (mid == begin || mid == end) {
            // Degenerate mean split; fall back to the median.
            mid = begin + (end - begin) / 2;
            std::nth_element(tree.order.begin() + begin, tree.order.begin() + mid,
                             tree.order.begin() + end, [&](std::uint32_t a, std::uint32_t b) {
                                 return data_[a * static_cast<std::size_t>(dim_) + split_dim] <
                                        data_[b * static_cast<std::size_t>(dim_) + split_dim];
                             });
        }

        tree.nodes[idx].split_dim = split_dim;
        tree.nodes[idx].split_val = split_val;
        const std::uint32_t left = build_node(tree, begin, mid, rng);
        const std::uint32_t right = build_node(tree, mid, end, rng);
        tree.nodes[idx].left = left;
        tree.nodes[idx].right = right;
        return idx;
    }

    const float* data_ = nullptr;
    std::size_t n_ = 0;
    int dim_ = 0;
    Params params_;
    std::vector<Tree> trees_;
};

}  // namespace pv
