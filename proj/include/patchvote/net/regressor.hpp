// patchvote/net/regressor.hpp — unified descriptor regressor (PCA / AE / CAE).
#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "patchvote/net/net.hpp"
#include "patchvote/net/pca.hpp"

namespace pv {

using Descriptor = Eigen::VectorXf;

/// A trainable encoder/decoder mapping a Patch to an F-dimensional descriptor
/// and back. Immutable once built/trained; encode calls are thread-safe.
class Regressor {
public:
    Regressor() = default;

    static Regressor from_pca(PcaModel model) {
        Regressor r;
        r.kind_ = RegressorKind::Pca;
        r.F_ = model.F;
        r.pca_ = std::move(model);
        return r;
    }

    static Regressor make_ae(int F, std::uint64_t seed) {
        Regressor r;
        r.kind_ = RegressorKind::Ae;
        r.F_ = F;
        r.net_ = pv::make_ae<float>(F, seed);
        return r;
    }

    static Regressor make_cae(int F, std::uint64_t seed) {
        Regressor r;
        r.kind_ = RegressorKind::Cae;
        r.F_ = F;
        r.net_ = pv::make_cae<float>(F, seed);
        return r;
    }

    static Regressor from_net(Net<float> net) {
        Regressor r;
        r.kind_ = net.kind();
        r.F_ = net.feature_dim();
        r.net_ = std::move(net);
        return r;
    }

    bool empty() const { return !pca_ && !net_; }
    RegressorKind kind() const { return kind_; }
    int feature_dim() const { return F_; }

    const PcaModel& pca() const { return require_pca(); }
    const Net<float>& net() const { return require_net(); }
    Net<float>& net() { return require_net(); }

    /// Descriptor + reconstruction for a single patch.
    std::pair<Descriptor, Eigen::VectorXf> forward(const Patch& patch) const {
        require_usable();
        Eigen::Map<const Eigen::VectorXf> x(patch.data.data(), Patch::kValues);
        if (kind_ == RegressorKind::Pca) {
            const Eigen::VectorXd xd = x.cast<double>();
            const Eigen::VectorXd code = pca_->encode(xd);
            return {code.cast<float>(), pca_->reconstruct(code).cast<float>()};
        }
        const auto out = net_->forward(x);
        return {out.descriptor.col(0), out.output.col(0)};
    }

    Descriptor encode(const Patch& patch) const { return forward(patch).first; }

    /// Batched encoding; column i of the result is the descriptor of
    /// patches[i]. The PCA path runs as one GEMM.
    Eigen::MatrixXf encode_batch(const std::vector<Patch>& patches) const {
        require_usable();
        const int n = static_cast<int>(patches.size());
        Eigen::MatrixXf X(Patch::kValues, n);
        for (int i = 0; i < n; ++i)
            X.col(i) = Eigen::Map<const Eigen::VectorXf>(patches[i].data.data(), Patch::kValues);
        if (kind_ == RegressorKind::Pca) {
            const Eigen::MatrixXf basis = pca_->basis.cast<float>();
            const Eigen::VectorXf mean = pca_->mean.cast<float>();
            X.colwise() -= mean;
            return basis * X;
        }
        return net_->forward(X).descriptor;
    }

private:
    const PcaModel& require_pca() const {
        if (!pca_) throw std::logic_error("regressor: no PCA model");
        return *pca_;
    }
    Net<float>& require_net() {
        if (!net_) throw std::logic_error("regressor: no network");
        return *net_;
    }
    const Net<float>& require_net() const {
        if (!net_) throw std::logic_error("regressor: no network");
        return *net_;
    }
    void require_usable() const {
        if (empty()) throw std::logic_error("regressor: not trained / not loaded");
    }

    RegressorKind kind_ = RegressorKind::Pca;
    int F_ = 0;
    std::optional<PcaModel> pca_;
    std::optional<Net<float>> net_;
};

}  // namespace pv
