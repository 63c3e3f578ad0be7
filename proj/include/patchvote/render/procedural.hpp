// patchvote/render/procedural.hpp — meshes used by tests and the self-contained
// benchmark: cube, icosphere and L-shaped prism with distinct face colors.
#pragma once

#include <cmath>
#include <cstdint>

#include "patchvote/core/viewpoints.hpp"
#include "patchvote/render/mesh.hpp"

namespace pv {

/// Saturated palette color; golden-ratio hue stepping keeps neighbors distinct.
inline Rgb8 palette_color(int index) {
    const double h = std::fmod(0.13 + index * 0.61803398875, 1.0) * 6.0;
    const int i = static_cast<int>(h);
    const double f = h - i;
    const double q = 1.0 - f;
    double r = 0, g = 0, b = 0;
    switch (i % 6) {
        case 0: r = 1, g = f, b = 0; break;
        case 1: r = q, g = 1, b = 0; break;
        case 2: r = 0, g = 1, b = f; break;
        case 3: r = 0, g = q, b = 1; break;
        case 4: r = f, g = 0, b = 1; break;
        default: r = 1, g = 0, b = q; break;
    }
    auto u8 = [](double v) { return static_cast<std::uint8_t>(std::lround(40 + 215 * v)); };
    return {u8(r), u8(g), u8(b)};
}

/// Scales a color toward black (t < 0) or white (t > 0).
inline Rgb8 shade(const Rgb8& c, double t) {
    auto mix = [&](int v) {
        const double m = t < 0 ? v * (1.0 + t) : v + (255.0 - v) * t;
        return static_cast<std::uint8_t>(std::clamp(m, 0.0, 255.0));
    };
    return {mix(c[0]), mix(c[1]), mix(c[2])};
}

/// Checker shade for cell (i,j) of a tessellated face. Local patches need
/// appearance that pins the viewing direction; a plain flat color would make
/// every face interior look alike from every view.
inline Rgb8 face_cell_color(int face, int i, int j) {
    const Rgb8 base = palette_color(face);
    const int parity = (i + j) & 1;
    const double t = parity ? -0.45 : 0.12 * ((i * 3 + j * 5 + face) % 3);
    return shade(base, t);
}

namespace procedural_detail {

/// Appends an outward quad a-b-c-d tessellated into cells x cells subquads,
/// colored by face_cell_color.
inline void add_patterned_quad(Mesh& m, int face, int cells, const Eigen::Vector3d& a,
                               const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                               const Eigen::Vector3d& d) {
    const Eigen::Vector3d du = (b - a) / cells;
    const Eigen::Vector3d dv = (d - a) / cells;
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
            const Rgb8 col = face_cell_color(face, i, j);
            const Eigen::Vector3d p = a + du * i + dv * j;
            const Eigen::Vector3d quad[4] = {p, p + du, p + du + dv, p + dv};
            const int base = static_cast<int>(m.vertices.size());
            for (const auto& v : quad) {
                m.vertices.push_back(v);
                m.colors.push_back(col);
            }
            m.triangles.push_back({base, base + 1, base + 2});
            m.triangles.push_back({base, base + 2, base + 3});
        }
}

}  // namespace procedural_detail

/// Axis-aligned cube centered at the origin. Each face carries a distinct
/// base color with a 4x4 checker pattern.
inline Mesh make_cube(double edge, int cells = 4) {
    Mesh m;
    const double h = edge / 2.0;
    const Eigen::Vector3d corners[8] = {
        {-h, -h, -h}, {h, -h, -h}, {h, h, -h}, {-h, h, -h},
        {-h, -h, h},  {h, -h, h},  {h, h, h},  {-h, h, h},
    };
    // Quads wound to face outward.
    const int faces[6][4] = {
        {0, 3, 2, 1},  // -z
        {4, 5, 6, 7},  // +z
        {0, 1, 5, 4},  // -y
        {2, 3, 7, 6},  // +y
        {0, 4, 7, 3},  // -x
        {1, 2, 6, 5},  // +x
    };
    for (int f = 0; f < 6; ++f)
        procedural_detail::add_patterned_quad(m, f, cells, corners[faces[f][0]],
                                              corners[faces[f][1]], corners[faces[f][2]],
                                              corners[faces[f][3]]);
    m.finalize();
    return m;
}

/// Sphere of the given radius, each triangle face flat-colored.
inline Mesh make_icosphere_mesh(int subdivisions, double radius) {
    const IcoSphere s = make_icosphere(subdivisions);
    Mesh m;
    for (std::size_t f = 0; f < s.triangles.size(); ++f) {
        const Rgb8 c = palette_color(static_cast<int>(f));
        const int base = static_cast<int>(m.vertices.size());
        for (int k = 0; k < 3; ++k) {
            m.vertices.push_back(s.vertices[s.triangles[f][k]] * radius);
            m.colors.push_back(c);
        }
        m.triangles.push_back({base, base + 1, base + 2});
    }
    m.finalize();
    return m;
}

/// L-shaped prism: an L cross-section in xy extruded along z, centered at the
/// vertex centroid. width/height span the L, thickness is the arm width.
/// Faces carry distinct base colors with checker patterning.
inline Mesh make_lprism(double width, double height, double thickness, double depth) {
    // Cross-section corners, counter-clockwise in xy.
    const double w = width, h = height, t = thickness;
    const Eigen::Vector2d cs[6] = {{0, 0}, {w, 0}, {w, t}, {t, t}, {t, h}, {0, h}};

    Mesh m;
    const double z0 = -depth / 2.0, z1 = depth / 2.0;

    // Six side walls.
    for (int i = 0; i < 6; ++i) {
        const Eigen::Vector2d& p = cs[i];
        const Eigen::Vector2d& q = cs[(i + 1) % 6];
        procedural_detail::add_patterned_quad(m, i, 3, {p.x(), p.y(), z0}, {q.x(), q.y(), z0},
                                              {q.x(), q.y(), z1}, {p.x(), p.y(), z1});
    }
    // Caps: the L split into its two rectangles, checkered like the walls.
    auto add_cap_rect = [&](int face, double z, bool flip, Eigen::Vector2d a, Eigen::Vector2d b,
                            Eigen::Vector2d c, Eigen::Vector2d d) {
        if (flip) std::swap(b, d);
        procedural_detail::add_patterned_quad(m, face, 2, {a.x(), a.y(), z}, {b.x(), b.y(), z},
                                              {c.x(), c.y(), z}, {d.x(), d.y(), z});
    };
    add_cap_rect(6, z0, true, cs[0], cs[1], cs[2], {0, t});
    add_cap_rect(6, z0, true, {0, t}, cs[3], cs[4], cs[5]);
    add_cap_rect(7, z1, false, cs[0], cs[1], cs[2], {0, t});
    add_cap_rect(7, z1, false, {0, t}, cs[3], cs[4], cs[5]);

    // Center on the vertex centroid.
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& v : m.vertices) mean += v;
    mean /= static_cast<double>(m.vertices.size());
    for (auto& v : m.vertices) v -= mean;

    m.finalize();
    return m;
}

/// Thin rectangular plate in the xy plane (two triangles, both sides
/// rasterize). Used as an occluder and as a tabletop stand-in.
inline Mesh make_plate(double width, double height, const Rgb8& color) {
    Mesh m;
    const double hw = width / 2.0, hh = height / 2.0;
    m.vertices = {{-hw, -hh, 0}, {hw, -hh, 0}, {hw, hh, 0}, {-hw, hh, 0}};
    m.colors = {color, color, color, color};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    m.finalize();
    return m;
}

}  // namespace pv
