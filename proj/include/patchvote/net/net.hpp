// patchvote/net/net.hpp — layer stacks for the AE and CAE regressors.
#pragma once

#include <memory>
#include <vector>

#include "patchvote/core/rng.hpp"
#include "patchvote/net/layers.hpp"
#include "patchvote/patch/patch.hpp"

namespace pv {

enum class RegressorKind : std::uint8_t { Pca = 0, Ae = 1, Cae = 2 };

template <typename S>
struct NetForward {
    MatX<S> output;
    MatX<S> descriptor;
};

/// A feed-forward stack. The descriptor is the activation after the last
/// encoder layer (the first contiguous run of layers whose output width
/// equals F).
template <typename S>
class Net {
public:
    Net() = default;
    Net(const Net& o) : kind_(o.kind_), F_(o.F_), encode_end_(o.encode_end_) {
        layers_.reserve(o.layers_.size());
        for (const auto& l : o.layers_) layers_.push_back(l->clone());
    }
    Net(Net&&) noexcept = default;
    Net& operator=(Net o) noexcept {
        std::swap(kind_, o.kind_);
        std::swap(F_, o.F_);
        std::swap(encode_end_, o.encode_end_);
        std::swap(layers_, o.layers_);
        return *this;
    }

    RegressorKind kind() const { return kind_; }
    int feature_dim() const { return F_; }
    int encode_end() const { return encode_end_; }
    const std::vector<std::unique_ptr<Layer<S>>>& layers() const { return layers_; }
    std::vector<std::unique_ptr<Layer<S>>>& layers() { return layers_; }

    void set_meta(RegressorKind kind, int F) {
        kind_ = kind;
        F_ = F;
        encode_end_ = derive_encode_end();
    }

    /// Thread-safe when caches == nullptr.
    NetForward<S> forward(const MatX<S>& X, std::vector<LayerCache<S>>* caches = nullptr) const {
        if (caches) caches->resize(layers_.size());
        NetForward<S> out;
        MatX<S> a = X, b;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            layers_[i]->forward(a, b, caches ? &(*caches)[i] : nullptr);
            std::swap(a, b);
            if (static_cast<int>(i) == encode_end_) out.descriptor = a;
        }
        out.output = std::move(a);
        return out;
    }

    /// Backpropagates dLoss/dOutput; gradients accumulate in the layers.
    void backward(const std::vector<LayerCache<S>>& caches, const MatX<S>& dOut) {
        MatX<S> d = dOut, dprev;
        for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
            layers_[i]->backward(caches[i], d, dprev);
            std::swap(d, dprev);
        }
    }

    void zero_grads() {
        for (auto& l : layers_) l->zero_grads();
    }

    void sgd_step(S lr) {
        for (auto& l : layers_)
            for (auto& g : l->param_groups()) *g.values -= lr * *g.grads;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers_) {
            auto groups = const_cast<Layer<S>*>(l.get())->param_groups();
            for (const auto& g : groups) n += static_cast<std::size_t>(g.values->size());
        }
        return n;
    }

private:
    int derive_encode_end() const {
        int last = -1;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            if (layers_[i]->out_size() == F_) {
                last = static_cast<int>(i);
            } else if (last >= 0) {
                break;  // end of the first F-wide run
            }
        }
        if (last < 0) throw ConfigError("net: no bottleneck layer of width F");
        return last;
    }

    RegressorKind kind_ = RegressorKind::Ae;
    int F_ = 0;
    int encode_end_ = -1;
    std::vector<std::unique_ptr<Layer<S>>> layers_;
};

namespace net_detail {

/// Uniform fan-in scaled init for weights, zero biases.
template <typename S>
inline void init_params(Net<S>& net, std::uint64_t seed) {
    Rng rng(seed);
    for (auto& layer : net.layers()) {
        const auto type = layer->type();
        if (type != LayerType::Fc && type != LayerType::Conv && type != LayerType::Deconv)
            continue;
        auto groups = layer->param_groups();
        const int fan_in = layer->in_size();
        int weight_fan = fan_in;
        if (type == LayerType::Conv) {
            const auto dims = layer->shape_dims();
            weight_fan = static_cast<int>(dims[1] * dims[2] * dims[2]);  // in_c * k * k
        } else if (type == LayerType::Deconv) {
            const auto dims = layer->shape_dims();
            weight_fan = static_cast<int>(dims[0]);  // in_c; each output sees one input pixel
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(weight_fan));
        for (auto& g : groups) {
            if (g.name != "weights") continue;
            for (Eigen::Index i = 0; i < g.values->size(); ++i)
                (*g.values)(i) = static_cast<S>(rng.uniform(-scale, scale));
        }
    }
}

}  // namespace net_detail

/// AE: 4096 -> hidden -> F -> hidden -> 4096, tanh throughout.
template <typename S>
inline Net<S> make_ae(int F, std::uint64_t seed, int hidden = 1024) {
    Net<S> net;
    auto& L = net.layers();
    const int n = Patch::kValues;
    L.push_back(std::make_unique<FcLayer<S>>(n, hidden));
    L.push_back(std::make_unique<TanhLayer<S>>(hidden));
    L.push_back(std::make_unique<FcLayer<S>>(hidden, F));
    L.push_back(std::make_unique<TanhLayer<S>>(F));
    L.push_back(std::make_unique<FcLayer<S>>(F, hidden));
    L.push_back(std::make_unique<TanhLayer<S>>(hidden));
    L.push_back(std::make_unique<FcLayer<S>>(hidden, n));
    L.push_back(std::make_unique<TanhLayer<S>>(n));
    net.set_meta(RegressorKind::Ae, F);
    net_detail::init_params(net, seed);
    return net;
}

/// CAE: 5x5 convs with PReLU, one 2x2 max-pool after the first convs, an
/// FC encode/decode pair around the F-wide bottleneck, learned 2x2 deconv
/// upscale, then 5x5 convs back to 4 channels with tanh output.
template <typename S>
inline Net<S> make_cae(int F, std::uint64_t seed, int c1 = 16, int c2 = 32) {
    Net<S> net;
    auto& L = net.layers();
    L.push_back(std::make_unique<ConvLayer<S>>(4, c1, 5, 32, 32));
    L.push_back(std::make_unique<PReluLayer<S>>(c1, 32 * 32));
    L.push_back(std::make_unique<ConvLayer<S>>(c1, c1, 5, 32, 32));
    L.push_back(std::make_unique<MaxPoolLayer<S>>(c1, 32, 32, 2));
    L.push_back(std::make_unique<ConvLayer<S>>(c1, c2, 5, 16, 16));
    L.push_back(std::make_unique<PReluLayer<S>>(c2, 16 * 16));
    L.push_back(std::make_unique<FcLayer<S>>(c2 * 16 * 16, F));
    L.push_back(std::make_unique<FcLayer<S>>(F, c2 * 16 * 16));
    L.push_back(std::make_unique<DeconvLayer<S>>(c2, c2, 2, 16, 16));
    L.push_back(std::make_unique<ConvLayer<S>>(c2, c1, 5, 32, 32));
    L.push_back(std::make_unique<PReluLayer<S>>(c1, 32 * 32));
    L.push_back(std::make_unique<ConvLayer<S>>(c1, 4, 5, 32, 32));
    L.push_back(std::make_unique<TanhLayer<S>>(4 * 32 * 32));
    net.set_meta(RegressorKind::Cae, F);
    net_detail::init_params(net, seed);
    return net;
}

/// Rebuilds the same architecture in another scalar type (float <-> double),
/// copying parameters. Used by the double-precision gradient check.
template <typename T, typename U>
inline Net<T> convert_net(const Net<U>& src) {
    Net<T> dst;
    for (const auto& layer : src.layers()) {
        const auto dims = layer->shape_dims();
        std::unique_ptr<Layer<T>> copy;
        switch (layer->type()) {
            case LayerType::Fc:
                copy = std::make_unique<FcLayer<T>>(static_cast<int>(dims[1]),
                                                    static_cast<int>(dims[0]));
                break;
            case LayerType::Conv:
                copy = std::make_unique<ConvLayer<T>>(static_cast<int>(dims[1]),
                                                      static_cast<int>(dims[0]),
                                                      static_cast<int>(dims[2]),
                                                      static_cast<int>(dims[3]),
                                                      static_cast<int>(dims[4]));
                break;
            case LayerType::Deconv:
                copy = std::make_unique<DeconvLayer<T>>(static_cast<int>(dims[0]),
                                                        static_cast<int>(dims[1]),
                                                        static_cast<int>(dims[2]),
                                                        static_cast<int>(dims[3]),
                                                        static_cast<int>(dims[4]));
                break;
            case LayerType::MaxPool:
                copy = std::make_unique<MaxPoolLayer<T>>(static_cast<int>(dims[0]),
                                                         static_cast<int>(dims[1]),
                                                         static_cast<int>(dims[2]),
                                                         static_cast<int>(dims[3]));
                break;
            case LayerType::PRelu:
                copy = std::make_unique<PReluLayer<T>>(static_cast<int>(dims[0]),
                                                       static_cast<int>(dims[1]));
                break;
            case LayerType::Tanh:
                copy = std::make_unique<TanhLayer<T>>(static_cast<int>(dims[0]));
                break;
            default:
                throw ConfigError("convert_net: unsupported layer type");
        }
        auto src_groups = const_cast<Layer<U>*>(layer.get())->param_groups();
        auto dst_groups = copy->param_groups();
        for (std::size_t g = 0; g < src_groups.size(); ++g)
            *dst_groups[g].values = src_groups[g].values->template cast<T>();
        dst.layers().push_back(std::move(copy));
    }
    dst.set_meta(src.kind(), src.feature_dim());
    return dst;
}

}  // namespace pv
