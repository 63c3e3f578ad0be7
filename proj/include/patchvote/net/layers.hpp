// patchvote/net/layers.hpp — network layers with batched forward/backward.
//
// Activations are column batches: each column is one sample, flattened
// channel-major as (C,H,W). forward() is const and thread-safe when no cache
// is passed; training passes a LayerCache per layer and then calls backward,
// which accumulates into layer-owned gradient buffers.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "patchvote/core/errors.hpp"

namespace pv {

enum class LayerType : std::uint8_t {
    Fc = 0,
    Conv = 1,
    Deconv = 2,
    MaxPool = 3,
    PRelu = 4,
    Tanh = 5,
    PcaMean = 6,
    PcaBasis = 7,
};

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
using MatXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

template <typename S>
struct LayerCache {
    MatX<S> X;   // input batch
    MatX<S> Y;   // output batch (kept only where backward needs it)
    MatXi idx;   // argmax indices for pooling
};

/// One named parameter tensor and its gradient accumulator.
template <typename S>
struct ParamGroup {
    std::string name;
    VecX<S>* values;
    VecX<S>* grads;
};

template <typename S>
class Layer {
public:
    virtual ~Layer() = default;
    virtual LayerType type() const = 0;
    virtual int in_size() const = 0;
    virtual int out_size() const = 0;
    virtual void forward(const MatX<S>& X, MatX<S>& Y, LayerCache<S>* cache) const = 0;
    virtual void backward(const LayerCache<S>& cache, const MatX<S>& dY, MatX<S>& dX) = 0;
    virtual std::vector<ParamGroup<S>> param_groups() = 0;
    /// Dims identifying the layer shape in the model file.
    virtual std::vector<std::uint32_t> shape_dims() const = 0;
    virtual std::unique_ptr<Layer<S>> clone() const = 0;

    void zero_grads() {
        for (auto& g : param_groups()) g.grads->setZero();
    }
};

// ---------------------------------------------------------------------------

template <typename S>
class FcLayer final : public Layer<S> {
public:
    FcLayer(int in, int out) : in_(in), out_(out) {
        W_.resize(static_cast<Eigen::Index>(in) * out);
        b_.resize(out);
        W_.setZero();
        b_.setZero();
        dW_ = W_;
        db_ = b_;
    }

    LayerType type() const override { return LayerType::Fc; }
    int in_size() const override { return in_; }
    int out_size() const override { return out_; }

    Eigen::Map<MatX<S>> weights() { return {W_.data(), out_, in_}; }
    Eigen::Map<const MatX<S>> weights() const { return {W_.data(), out_, in_}; }
    VecX<S>& bias() { return b_; }

    void forward(const MatX<S>& X, MatX<S>& Y, LayerCache<S>* cache) const override {
        Eigen::Map<const MatX<S>> W(W_.data(), out_, in_);
        Y.noalias() = W * X;
        Y.colwise() += b_;
        if (cache) cache->X = X;
    }

    void backward(const LayerCache<S>& cache, const MatX<S>& dY, MatX<S>& dX) override {
        Eigen::Map<const MatX<S>> W(W_.data(), out_, in_);
        Eigen::Map<MatX<S>> dW(dW_.data(), out_, in_);
        dW.noalias() += dY * cache.X.transpose();
        db_.noalias() += dY.rowwise().sum();
        dX.noalias() = W.transpose() * dY;
    }

    std::vector<ParamGroup<S>> param_groups() override {
        return {{"weights", &W_, &dW_}, {"bias", &b_, &db_}};
    }
    std::vector<std::uint32_t> shape_dims() const override {
        return {static_cast<std::uint32_t>(out_), static_cast<std::uint32_t>(in_)};
    }
    std::unique_ptr<Layer<S>> clone() const override { return std::make_unique<FcLayer>(*this); }

private:
    int in_, out_;
    VecX<S> W_, b_, dW_, db_;
};

// ---------------------------------------------------------------------------

/// 2D convolution, stride 1, same padding (k odd), via im2col + GEMM.
template <typename S>
class ConvLayer final : public Layer<S> {
public:
    ConvLayer(int in_c, int out_c, int k, int h, int w)
        : in_c_(in_c), out_c_(out_c), k_(k), h_(h), w_(w), pad_((k - 1) / 2) {
        if (k % 2 != 1) throw ConfigError("conv: kernel size must be odd");
        W_.resize(static_cast<Eigen::Index>(out_c) * in_c * k * k);
        b_.resize(out_c);
        W_.setZero();
        b_.setZero();
        dW_ = W_;
        db_ = b_;
    }

    LayerType type() const override { return LayerType::Conv; }
    int in_size() const override { return in_c_ * h_ * w_; }
    int out_size() const override { return out_c_ * h_ * w_; }

    // im2col scratch is row-major so a kernel-tap row is contiguous.
    using ColsMat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    void forward(const MatX<S>& X, MatX<S>& Y, LayerCache<S>* cache) const override {
        const int hw = h_ * w_;
        Y.resize(static_cast<Eigen::Index>(out_c_) * hw, X.cols());
        Eigen::Map<const MatX<S>> W(W_.data(), out_c_, in_c_ * k_ * k_);
        ColsMat cols(in_c_ * k_ * k_, hw);
        for (Eigen::Index s = 0; s < X.cols(); ++s) {
            im2col(X.col(s).data(), cols);
            // Channel-major planes: map as (hw, out_c) so plane o is contiguous.
            Eigen::Map<MatX<S>> Ys(Y.col(s).data(), hw, out_c_);
            Ys.noalias() = cols.transpose() * W.transpose();
            Ys.rowwise() += b_.transpose();
        }
        if (cache) cache->X = X;
    }

    void backward(const LayerCache<S>& cache, const MatX<S>& dY, MatX<S>& dX) override {
        const int hw = h_ * w_;
        dX.resize(cache.X.rows(), cache.X.cols());
        Eigen::Map<const MatX<S>> W(W_.data(), out_c_, in_c_ * k_ * k_);
        Eigen::Map<MatX<S>> dW(dW_.data(), out_c_, in_c_ * k_ * k_);
        ColsMat cols(in_c_ * k_ * k_, hw);
        ColsMat dcols(in_c_ * k_ * k_, hw);
        for (Eigen::Index s = 0; s < dY.cols(); ++s) {
            im2col(cache.X.col(s).data(), cols);
            Eigen::Map<const MatX<S>> dYs(dY.col(s).data(), hw, out_c_);
            dW.noalias() += dYs.transpose() * cols.transpose();
            db_.noalias() += dYs.colwise().sum().transpose();
            dcols.noalias() = W.transpose() * dYs.transpose();
            col2im(dcols, dX.col(s).data());
        }
    }

    std::vector<ParamGroup<S>> param_groups() override {
        return {{"weights", &W_, &dW_}, {"bias", &b_, &db_}};
    }
    std::vector<std::uint32_t> shape_dims() const override {
        return {static_cast<std::uint32_t>(out_c_), static_cast<std::uint32_t>(in_c_),
                static_cast<std::uint32_t>(k_), static_cast<std::uint32_t>(h_),
                static_cast<std::uint32_t>(w_)};
    }
    std::unique_ptr<Layer<S>> clone() const override { return std::make_unique<ConvLayer>(*this); }

private:
    void im2col(const S* x, ColsMat& cols) const {
        for (int c = 0; c < in_c_; ++c) {
            const S* plane = x + static_cast<std::size_t>(c) * h_ * w_;
            for (int ky = 0; ky < k_; ++ky)
                for (int kx = 0; kx < k_; ++kx) {
                    const int row = (c * k_ + ky) * k_ + kx;
                    for (int y = 0; y < h_; ++y) {
                        const int sy = y + ky - pad_;
                        S* dst = &cols(row, y * w_);
                        if (sy < 0 || sy >= h_) {
                            std::fill(dst, dst + w_, S(0));
                            continue;
                        }
                        const S* src = plane + static_cast<std::size_t>(sy) * w_;
                        for (int x2 = 0; x2 < w_; ++x2) {
                            const int sx = x2 + kx - pad_;
                            dst[x2] = (sx < 0 || sx >= w_) ? S(0) : src[sx];
                        }
                    }
                }
        }
    }

    void col2im(const ColsMat& dcols, S* dx) const {
        std::fill(dx, dx + static_cast<std::size_t>(in_c_) * h_ * w_, S(0));
        for (int c = 0; c < in_c_; ++c) {
            S* plane = dx + static_cast<std::size_t>(c) * h_ * w_;
            for (int ky = 0; ky < k_; ++ky)
                for (int kx = 0; kx < k_; ++kx) {
                    const int row = (c * k_ + ky) * k_ + kx;
                    for (int y = 0; y < h_; ++y) {
                        const int sy = y + ky - pad_;
                        if (sy < 0 || sy >= h_) continue;
                        S* dst = plane + static_cast<std::size_t>(sy) * w_;
                        const S* src = &dcols(row, y * w_);
                        for (int x2 = 0; x2 < w_; ++x2) {
                            const int sx = x2 + kx - pad_;
                            if (sx >= 0 && sx < w_) dst[sx] += src[x2];
                        }
                    }
                }
        }
    }

    int in_c_, out_c_, k_, h_, w_, pad_;
    VecX<S> W_, b_, dW_, db_;
};

// ---------------------------------------------------------------------------

/// Transposed convolution with kernel == stride (learned upscale); output is
/// (out_c, h*k, w*k), each input position painting a disjoint k x k block.
template <typename S>
class DeconvLayer final : public Layer<S> {
public:
    DeconvLayer(int in_c, int out_c, int k, int h, int w)
        : in_c_(in_c), out_c_(out_c), k_(k), h_(h), w_(w) {
        W_.resize(static_cast<Eigen::Index>(in_c) * out_c * k * k);
        b_.resize(out_c);
        W_.setZero();
        b_.setZero();
        dW_ = W_;
        db_ = b_;
    }

    LayerType type() const override { return LayerType::Deconv; }
    int in_size() const override { return in_c_ * h_ * w_; }
    int out_size() const override { return out_c_ * h_ * w_ * k_ * k_; }

    void forward(const MatX<S>& X, MatX<S>& Y, LayerCache<S>* cache) const override {
        const int hw = h_ * w_;
        Y.resize(static_cast<Eigen::Index>(out_size()), X.cols());
        // Wm: (out_c*k*k) x in_c, row index (o*k + dy)*k + dx.
        Eigen::Map<const MatX<S>> Wm(W_.data(), out_c_ * k_ * k_, in_c_);
        MatX<S> block(out_c_ * k_ * k_, hw);
        for (Eigen::Index s = 0; s < X.cols(); ++s) {
            Eigen::Map<const MatX<S>> Xs(X.col(s).data(), hw, in_c_);
            block.noalias() = Wm * Xs.transpose();
            scatter(block, Y.col(s).data());
        }
        if (cache) cache->X = X;
    }

    void backward(const LayerCache<S>& cache, const MatX<S>& dY, MatX<S>& dX) override {
        const int hw = h_ * w_;
        dX.resize(cache.X.rows(), cache.X.cols());
        Eigen::Map<const MatX<S>> Wm(W_.data(), out_c_ * k_ * k_, in_c_);
        Eigen::Map<MatX<S>> dWm(dW_.data(), out_c_ * k_ * k_, in_c_);
        MatX<S> dblock(out_c_ * k_ * k_, hw);
        for (Eigen::Index s = 0; s < dY.cols(); ++s) {
            gather(dY.col(s).data(), dblock);
            Eigen::Map<const MatX<S>> Xs(cache.X.col(s).data(), hw, in_c_);
            dWm.noalias() += dblock * Xs;
            for (int o = 0; o < out_c_; ++o)
                db_(o) += dblock.middleRows(o * k_ * k_, k_ * k_).sum();
            Eigen::Map<MatX<S>> dXs(dX.col(s).data(), hw, in_c_);
            dXs.noalias() = dblock.transpose() * Wm;
        }
    }

    std::vector<ParamGroup<S>> param_groups() override {
        return {{"weights", &W_, &dW_}, {"bias", &b_, &db_}};
    }
    std::vector<std::uint32_t> shape_dims() const override {
        return {static_cast<std::uint32_t>(in_c_), static_cast<std::uint32_t>(out_c_),
                static_cast<std::uint32_t>(k_), static_cast<std::uint32_t>(h_),
                static_cast<std::uint32_t>(w_)};
    }
    std::unique_ptr<Layer<S>> clone() const override {
        return std::make_unique<DeconvLayer>(*this);
    }

private:
    void scatter(const MatX<S>& block, S* y) const {
        const int oh = h_ * k_, ow = w_ * k_;
        for (int o = 0; o < out_c_; ++o) {
            S* plane = y + static_cast<std::size_t>(o) * oh * ow;
            for (int dy = 0; dy < k_; ++dy)
                for (int dx = 0; dx < k_; ++dx) {
                    const int row = (o * k_ + dy) * k_ + dx;
                    for (int iy = 0; iy < h_; ++iy)
                        for (int ix = 0; ix < w_; ++ix)
                            plane[(iy * k_ + dy) * ow + ix * k_ + dx] =
                                block(row, iy * w_ + ix) + b_(o);
                }
        }
    }

    void gather(const S* dy, MatX<S>& dblock) const {
        const int oh = h_ * k_, ow = w_ * k_;
        for (int o = 0; o < out_c_; ++o) {
            const S* plane = dy + static_cast<std::size_t>(o) * oh * ow;
            for (int dyk = 0; dyk < k_; ++dyk)
                for (int dx = 0; dx < k_; ++dx) {
                    const int row = (o * k_ + dyk) * k_ + dx;
                    for (int iy = 0; iy < h_; ++iy)
                        for (int ix = 0; ix < w_; ++ix)
                            dblock(row, iy * w_ + ix) = plane[(iy * k_ + dyk) * ow + ix * k_ + dx];
                }
        }
    }

    int in_c_, out_c_, k_, h_, w_;
    VecX<S> W_, b_, dW_, db_;
};

// ---------------------------------------------------------------------------

template <typename S>
class MaxPoolLayer final : public Layer<S> {
public:
    MaxPoolLayer(int c, int h, int w, int k = 2) : c_(c), h_(h), w_(w), k_(k) {
        if (h % k != 0 || w % k != 0) throw ConfigError("maxpool: size must divide input");
    }

    LayerType type() const override { return LayerType::MaxPool; }
    int in_size() const override { return c_ * h_ * w_; }
    int out_size() const override { return c_ * (h_ / k_) * (w_ / k_); }

    void forward(const MatX<S>& X, MatX<S>& Y, LayerCache<S>* cache) const override {
        const int oh = h_ / k_, ow = w_ / k_;
        Y.resize(static_cast<Eigen::Index>(out_size()), X.cols());
        if (cache) cache->idx.resize(out_size(), X.cols());
        for (Eigen::Index s = 0; s < X.cols(); ++s) {
            const S* x = X.col(s).data();
            S* y = Y.col(s).data();
            for (int c = 0; c < c_; ++c)
                for (int oy = 0; oy < oh; ++oy)
                    for (int ox = 0; ox < ow; ++ox) {
                        int best = (c * h_ + oy * k_) * w_ + ox * k_;
                        S bv = x[best];
                        for (int dy = 0; dy < k_; ++dy)
                            for (int dx = 0; dx < k_; ++dx) {
                                const int i = (c * h_ + oy * k_ + dy) * w_ + ox * k_ + dx;
                                if (x[i] > bv) {
                                    bv = x[i];
                                    best = i;
                                }
                            }
                        const int out_i = (c * oh + oy) * ow + ox;
                        y[out_i] = bv;
                        if (cache) cache->idx(out_i, s) = best;
                    }
        }
    }

    void backward(const LayerCache<S>& cache, const MatX<S>& dY, MatX<S>& dX) override {
        dX.setZero(in_size(), dY.cols());
        for (Eigen::Index s = 0; s < dY.cols(); ++s)
            for (int i = 0; i < out_size(); ++i) dX(cache.idx(i, s), s) += dY(i, s);
    }

    std::vector<ParamGroup<S>> param_groups() override { return {}; }
    std::vector<std::uint32_t> shape_dims() const override {
        return {static_cast<std::uint32_t>(c_), static_cast<std::uint32_t>(h_),
                static_cast<std::uint32_t>(w_), static_cast<std::uint32_t>(k_)};
    }
    std::unique_ptr<Layer<S>> clone() const override {
        return std::make_unique<MaxPoolLayer>(*this);
    }

private:
    int c_, h_, w_, k_;
};

// ---------------------------------------------------------------------------

/// Parametrized ReLU with one learned slope per channel.
template <typename S>
class PReluLayer final : public Layer<S> {
public:
    PReluLayer(int channels, int per_channel, S init_slope = S(0.25))
        : channels_(channels), per_channel_(per_channel) {
        a_.resize(channels);
        a_.setConstant(init_slope);
        da_ = a_;
        da_.setZero();
    }

    LayerType type() const override { return LayerType::PRelu; }
    int in_size() const override { return channels_ * per_channel_; }
    int out_size() const override { return channels_ * per_channel_; }

    void forward(const MatX<S>& X, MatX<S>& Y, LayerCache<S>* cache) const override {
        Y.resize(X.rows(), X.cols());
        for (Eigen::Index s = 0; s < X.cols(); ++s)
            for (int c = 0; c < channels_; ++c) {
                const S a = a_(c);
                for (int i = 0; i < per_channel_; ++i) {
                    const Eigen::Index r = static_cast<Eigen::Index>(c) * per_channel_ + i;
                    const S x = X(r, s);
                    Y(r, s) = x > S(0) ? x : a * x;
                }
            }
        if (cache) cache->X = X;
    }

    void backward(const LayerCache<S>& cache, const MatX<S>& dY, MatX<S>& dX) override {
        dX.resize(dY.rows(), dY.cols());
        for (Eigen::Index s = 0; s < dY.cols(); ++s)
            for (int c = 0; c < channels_; ++c) {
                const S a = a_(c);
                for (int i = 0; i < per_channel_; ++i) {
                    const Eigen::Index r = static_cast<Eigen::Index>(c) * per_channel_ + i;
                    const S x = cache.X(r, s);
                    if (x > S(0)) {
                        dX(r, s) = dY(r, s);
                    } else {
                        dX(r, s) = a * dY(r, s);
                        da_(c) += dY(r, s) * x;
                    }
                }
            }
    }

    std::vector<ParamGroup<S>> param_groups() override { return {{"slopes", &a_, &da_}}; }
    std::vector<std::uint32_t> shape_dims() const override {
        return {static_cast<std::uint32_t>(channels_), static_cast<std::uint32_t>(per_channel_)};
    }
    std::unique_ptr<Layer<S>> clone() const override { return std::make_unique<PReluLayer>(*this); }

private:
    int channels_, per_channel_;
    VecX<S> a_, da_;
};

// ---------------------------------------------------------------------------

template <typename S>
class TanhLayer final : public Layer<S> {
public:
    explicit TanhLayer(int size) : size_(size) {}

    LayerType type() const override { return LayerType::Tanh; }
    int in_size() const override { return size_; }
    int out_size() const override { return size_; }

    void forward(const MatX<S>& X, MatX<S>& Y, LayerCache<S>* cache) const override {
        Y = X.array().tanh();
        if (cache) cache->Y = Y;
    }

    void backward(const LayerCache<S>& cache, const MatX<S>& dY, MatX<S>& dX) override {
        dX = dY.array() * (S(1) - cache.Y.array().square());
    }

    std::vector<ParamGroup<S>> param_groups() override { return {}; }
    std::vector<std::uint32_t> shape_dims() const override {
        return {static_cast<std::uint32_t>(size_)};
    }
    std::unique_ptr<Layer<S>> clone() const override { return std::make_unique<TanhLayer>(*this); }

private:
    int size_;
};

}  // namespace pv
