// patchvote/net/train.hpp — SGD reconstruction training.
//
// Plain SGD on the mean squared reconstruction error (unweighted mean over
// all 4096 values). Samples are reshuffled every epoch and augmented per
// draw. The recorded loss curve is evaluated on a fixed un-augmented probe
// batch every 10 iterations, so zero learning rate gives an exactly constant
// curve and equal seeds give bit-identical curves.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "patchvote/core/rng.hpp"
#include "patchvote/net/net.hpp"
#include "patchvote/patch/augment.hpp"
#include "patchvote/patch/patch.hpp"

namespace pv {

struct TrainConfig {
    int batch_size = 500;
    double learning_rate = 1e-5;
    int iterations = 2000;
    std::uint64_t seed = 1;

    void require_valid() const {
        if (batch_size < 1 || iterations < 1 || learning_rate < 0)
            throw ConfigError("train: batch_size/iterations must be positive, lr >= 0");
    }
};

struct TrainResult {
    std::vector<std::pair<int, double>> loss_curve;  // (iteration, probe loss)
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

namespace train_detail {

inline double batch_loss(const MatX<float>& out, const MatX<float>& target) {
    return (out - target).squaredNorm() / (static_cast<double>(out.rows()) * out.cols());
}

}  // namespace train_detail

/// Trains the net in place. Throws if the loss turns non-finite.
inline TrainResult train(Net<float>& net, const std::vector<Patch>& patches,
                         const TrainConfig& cfg) {
    cfg.require_valid();
    if (patches.empty()) throw ConfigError("train: no training patches");
    const int n = static_cast<int>(patches.size());
    const int batch = std::min(cfg.batch_size, n);

    // Fixed probe batch for the loss curve.
    MatX<float> probe(Patch::kValues, batch);
    for (int i = 0; i < batch; ++i)
        probe.col(i) = Eigen::Map<const Eigen::VectorXf>(patches[i].data.data(), Patch::kValues);
    auto probe_loss = [&]() {
        return train_detail::batch_loss(net.forward(probe).output, probe);
    };

    Rng rng(cfg.seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::size_t cursor = static_cast<std::size_t>(n);  // forces an initial shuffle

    TrainResult result;
    result.initial_loss = probe_loss();

    std::vector<LayerCache<float>> caches;
    MatX<float> X(Patch::kValues, batch);
    const float scale = 2.0f / static_cast<float>(Patch::kValues * batch);

    for (int it = 0; it < cfg.iterations; ++it) {
        if (it % 10 == 0) result.loss_curve.emplace_back(it, probe_loss());

        for (int i = 0; i < batch; ++i) {
            if (cursor >= order.size()) {
                // Fisher-Yates reshuffle at each epoch boundary.
                for (int j = n - 1; j > 0; --j)
                    std::swap(order[j], order[rng.uniform_index(j + 1)]);
                cursor = 0;
            }
            const Patch augmented = apply_augment(patches[order[cursor++]], draw_augment(rng));
            X.col(i) = Eigen::Map<const Eigen::VectorXf>(augmented.data.data(), Patch::kValues);
        }

        const auto fwd = net.forward(X, &caches);
        const double loss = train_detail::batch_loss(fwd.output, X);
        if (!std::isfinite(loss))
            throw std::runtime_error("training diverged: non-finite loss at iteration " +
                                     std::to_string(it));
        if (cfg.learning_rate == 0.0) continue;  // nothing to update

        net.zero_grads();
        const MatX<float> dOut = (fwd.output - X) * scale;
        net.backward(caches, dOut);
        net.sgd_step(static_cast<float>(cfg.learning_rate));
    }

    result.final_loss = probe_loss();
    result.loss_curve.emplace_back(cfg.iterations, result.final_loss);
    return result;
}

}  // namespace pv
