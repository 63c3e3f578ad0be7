// patchvote/net/gradcheck.hpp — finite-difference validation of the
// backpropagation, in double precision.
//
// Max-pool and PReLU make the loss piecewise-smooth: a probe whose +-eps
// window crosses an argmax flip or a sign change has no valid central
// difference. Such probes are detected by comparing the activation pattern
// on both sides and skipped; everything else must match the analytic
// gradient.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "patchvote/net/net.hpp"
#include "patchvote/patch/patch.hpp"

namespace pv {

struct GradCheckReport {
    double max_rel_error = 0.0;
    int checked_params = 0;
    int skipped_nonsmooth = 0;
};

namespace gradcheck_detail {

struct ProbeResult {
    double loss;
    std::vector<std::int32_t> pattern;  // pool argmaxes and PReLU input signs
};

inline ProbeResult probe(const Net<double>& net, const MatX<double>& X) {
    std::vector<LayerCache<double>> caches;
    const auto out = net.forward(X, &caches).output;
    ProbeResult r;
    r.loss = (out - X).squaredNorm() / static_cast<double>(out.rows() * out.cols());
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
        const auto type = net.layers()[i]->type();
        if (type == LayerType::MaxPool) {
            const auto& idx = caches[i].idx;
            r.pattern.insert(r.pattern.end(), idx.data(), idx.data() + idx.size());
        } else if (type == LayerType::PRelu) {
            const auto& x = caches[i].X;
            for (Eigen::Index j = 0; j < x.size(); ++j)
                r.pattern.push_back(x.data()[j] > 0.0 ? 1 : 0);
        }
    }
    return r;
}

/// Evenly spread sample of parameter indices, always including both ends.
inline std::vector<Eigen::Index> sample_indices(Eigen::Index size, int want) {
    std::vector<Eigen::Index> idx;
    if (size <= want) {
        for (Eigen::Index i = 0; i < size; ++i) idx.push_back(i);
        return idx;
    }
    for (int i = 0; i < want; ++i)
        idx.push_back(static_cast<Eigen::Index>((size - 1) * static_cast<double>(i) / (want - 1)));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

}  // namespace gradcheck_detail

/// Compares analytic gradients of the reconstruction loss against central
/// finite differences for every parameter group of every layer, sampling
/// `samples_per_group` entries per group. Returns the max relative error
/// over all smooth probes.
inline GradCheckReport gradient_check(Net<double>& net, const Patch& patch, double epsilon = 1e-5,
                                      int samples_per_group = 12) {
    MatX<double> X(Patch::kValues, 1);
    for (int i = 0; i < Patch::kValues; ++i) X(i, 0) = patch.data[i];

    std::vector<LayerCache<double>> caches;
    const auto fwd = net.forward(X, &caches);
    net.zero_grads();
    const MatX<double> dOut = (fwd.output - X) * (2.0 / static_cast<double>(Patch::kValues));
    net.backward(caches, dOut);

    GradCheckReport report;
    for (auto& layer : net.layers()) {
        for (auto& group : layer->param_groups()) {
            for (Eigen::Index i :
                 gradcheck_detail::sample_indices(group.values->size(), samples_per_group)) {
                const double saved = (*group.values)(i);
                (*group.values)(i) = saved + epsilon;
                const auto plus = gradcheck_detail::probe(net, X);
                (*group.values)(i) = saved - epsilon;
                const auto minus = gradcheck_detail::probe(net, X);
                (*group.values)(i) = saved;

                if (plus.pattern != minus.pattern) {
                    ++report.skipped_nonsmooth;
                    continue;
                }
                const double numeric = (plus.loss - minus.loss) / (2.0 * epsilon);
                const double analytic = (*group.grads)(i);
                const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-5});
                report.max_rel_error =
                    std::max(report.max_rel_error, std::abs(numeric - analytic) / denom);
                ++report.checked_params;
            }
        }
    }
    return report;
}

}  // namespace pv
