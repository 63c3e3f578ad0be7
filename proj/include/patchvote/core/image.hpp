// patchvote/core/image.hpp — image containers and the RGB-D frame carrier.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "patchvote/core/errors.hpp"
#include "patchvote/core/intrinsics.hpp"

namespace pv {

using Rgb8 = std::array<std::uint8_t, 3>;

/// Row-major single-plane image.
template <typename T>
class Image {
public:
    Image() = default;
    Image(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }

    T& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    bool contains(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Registered color + metric depth. Depth 0 marks invalid pixels, which makes
/// the depth image double as the validity mask.
struct RgbdFrame {
    Image<Rgb8> color;
    Image<float> depth;  // meters, 0 = invalid
    CameraIntrinsics intrinsics;

    bool valid_depth(int x, int y) const { return depth.at(x, y) > 0.0f; }

    void require_consistent() const {
        if (color.width() != depth.width() || color.height() != depth.height())
            throw ConfigError("RgbdFrame: color/depth size mismatch");
        if (color.width() != intrinsics.width || color.height() != intrinsics.height)
            throw ConfigError("RgbdFrame: image size does not match intrinsics");
    }
};

}  // namespace pv
