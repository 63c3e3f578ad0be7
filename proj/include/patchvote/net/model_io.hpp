// patchvote/net/model_io.hpp — regressor model files.
//
// Binary little-endian: magic "PVRG", version u32, kind u8, F u32,
// layer count u32, then per layer: type u8, dim count u32, dims u32[],
// raw f32 parameters. Load/save round trips are bit-exact.
#pragma once

#include <string>

#include "patchvote/io/binary.hpp"
#include "patchvote/net/regressor.hpp"

namespace pv {

namespace model_io_detail {

constexpr std::uint32_t kVersion = 1;

inline void write_layer(BinaryWriter& out, Layer<float>& layer) {
    out.u8(static_cast<std::uint8_t>(layer.type()));
    const auto dims = layer.shape_dims();
    out.u32(static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) out.u32(d);
    for (auto& group : layer.param_groups())
        out.f32_array(group.values->data(), static_cast<std::size_t>(group.values->size()));
}

inline std::unique_ptr<Layer<float>> read_layer(BinaryReader& in) {
    const auto type = static_cast<LayerType>(in.u8());
    const std::uint32_t ndims = in.u32();
    if (ndims > 8) throw FormatError("model: implausible dim count in " + in.path(), in.offset());
    std::vector<std::uint32_t> dims(ndims);
    for (auto& d : dims) d = in.u32();
    auto geti = [&](std::size_t i) { return static_cast<int>(dims.at(i)); };

    std::unique_ptr<Layer<float>> layer;
    switch (type) {
        case LayerType::Fc: layer = std::make_unique<FcLayer<float>>(geti(1), geti(0)); break;
        case LayerType::Conv:
            layer = std::make_unique<ConvLayer<float>>(geti(1), geti(0), geti(2), geti(3), geti(4));
            break;
        case LayerType::Deconv:
            layer = std::make_unique<DeconvLayer<float>>(geti(0), geti(1), geti(2), geti(3),
                                                         geti(4));
            break;
        case LayerType::MaxPool:
            layer = std::make_unique<MaxPoolLayer<float>>(geti(0), geti(1), geti(2), geti(3));
            break;
        case LayerType::PRelu:
            layer = std::make_unique<PReluLayer<float>>(geti(0), geti(1));
            break;
        case LayerType::Tanh: layer = std::make_unique<TanhLayer<float>>(geti(0)); break;
        default:
            throw FormatError("model: unknown layer type in " + in.path(), in.offset());
    }
    for (auto& group : layer->param_groups())
        in.f32_array(group.values->data(), static_cast<std::size_t>(group.values->size()));
    return layer;
}

}  // namespace model_io_detail

inline void save_regressor(const Regressor& reg, const std::string& path) {
    using namespace model_io_detail;
    if (reg.empty()) throw ConfigError("save_regressor: empty regressor");
    BinaryWriter out(path);
    out.bytes("PVRG", 4);
    out.u32(kVersion);
    out.u8(static_cast<std::uint8_t>(reg.kind()));
    out.u32(static_cast<std::uint32_t>(reg.feature_dim()));

    if (reg.kind() == RegressorKind::Pca) {
        const PcaModel& pca = reg.pca();
        out.u32(2);  // mean + basis pseudo-layers
        out.u8(static_cast<std::uint8_t>(LayerType::PcaMean));
        out.u32(1);
        out.u32(static_cast<std::uint32_t>(pca.mean.size()));
        const Eigen::VectorXf mean = pca.mean.cast<float>();
        out.f32_array(mean.data(), static_cast<std::size_t>(mean.size()));

        out.u8(static_cast<std::uint8_t>(LayerType::PcaBasis));
        out.u32(2);
        out.u32(static_cast<std::uint32_t>(pca.basis.rows()));
        out.u32(static_cast<std::uint32_t>(pca.basis.cols()));
        // Row-major so each component is contiguous.
        const Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> basis =
            pca.basis.cast<float>();
        out.f32_array(basis.data(), static_cast<std::size_t>(basis.size()));
    } else {
        auto& net = const_cast<Regressor&>(reg).net();
        out.u32(static_cast<std::uint32_t>(net.layers().size()));
        for (auto& layer : net.layers()) write_layer(out, *layer);
    }
    out.close();
}

inline Regressor load_regressor(const std::string& path) {
    using namespace model_io_detail;
    BinaryReader in(path);
    in.expect_magic("PVRG");
    const std::uint32_t version = in.u32();
    if (version != kVersion)
        throw FormatError("model: unsupported version " + std::to_string(version) + " in " + path,
                          in.offset() - 4);
    const auto kind = static_cast<RegressorKind>(in.u8());
    const int F = static_cast<int>(in.u32());
    const std::uint32_t layer_count = in.u32();

    if (kind == RegressorKind::Pca) {
        if (layer_count != 2) throw FormatError("model: PCA expects 2 blocks in " + path, in.offset());
        PcaModel pca;
        pca.F = F;
        if (static_cast<LayerType>(in.u8()) != LayerType::PcaMean)
            throw FormatError("model: expected mean block in " + path, in.offset() - 1);
        if (in.u32() != 1) throw FormatError("model: bad mean dims in " + path, in.offset());
        const std::uint32_t d = in.u32();
        Eigen::VectorXf mean(d);
        in.f32_array(mean.data(), d);
        pca.mean = mean.cast<double>();

        if (static_cast<LayerType>(in.u8()) != LayerType::PcaBasis)
            throw FormatError("model: expected basis block in " + path, in.offset() - 1);
        if (in.u32() != 2) throw FormatError("model: bad basis dims in " + path, in.offset());
        const std::uint32_t rows = in.u32(), cols = in.u32();
        if (rows != static_cast<std::uint32_t>(F))
            throw FormatError("model: basis rows != F in " + path, in.offset());
        Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> basis(rows, cols);
        in.f32_array(basis.data(), static_cast<std::size_t>(rows) * cols);
        pca.basis = basis.cast<double>();
        return Regressor::from_pca(std::move(pca));
    }

    if (kind != RegressorKind::Ae && kind != RegressorKind::Cae)
        throw FormatError("model: unknown regressor kind in " + path, 9);
    Net<float> net;
    for (std::uint32_t i = 0; i < layer_count; ++i) net.layers().push_back(read_layer(in));
    net.set_meta(kind, F);
    return Regressor::from_net(std::move(net));
}

}  // namespace pv
