// patchvote/render/mesh.hpp — colored triangle mesh.
#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "patchvote/core/errors.hpp"
#include "patchvote/core/image.hpp"

namespace pv {

/// Triangle mesh with per-vertex colors, in meters, object frame.
/// Call finalize() after filling vertices/colors/triangles.
struct Mesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Rgb8> colors;
    std::vector<std::array<int, 3>> triangles;

    double diameter = 0.0;            // max pairwise vertex distance
    Eigen::Vector3d centroid{0, 0, 0};  // mean of vertices

    void finalize() {
        if (triangles.empty()) throw ConfigError("mesh: needs at least one triangle");
        if (colors.size() != vertices.size())
            throw ConfigError("mesh: one color per vertex required");
        const int n = static_cast<int>(vertices.size());
        for (const auto& t : triangles)
            for (int i : t)
                if (i < 0 || i >= n) throw ConfigError("mesh: triangle index out of range");

        centroid.setZero();
        for (const auto& v : vertices) centroid += v;
        centroid /= static_cast<double>(vertices.size());

        diameter = 0.0;
        for (std::size_t i = 0; i < vertices.size(); ++i)
            for (std::size_t j = i + 1; j < vertices.size(); ++j)
                diameter = std::max(diameter, (vertices[i] - vertices[j]).norm());
        if (!(diameter > 0.0)) throw ConfigError("mesh: degenerate (zero diameter)");
    }
};

}  // namespace pv
