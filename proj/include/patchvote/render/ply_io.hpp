// patchvote/render/ply_io.hpp — ASCII PLY with per-vertex color.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "patchvote/core/errors.hpp"
#include "patchvote/render/mesh.hpp"

namespace pv {

/// Reads an ASCII PLY mesh (properties x,y,z,red,green,blue; face vertex
/// index lists). Faces with more than three vertices are fan-triangulated.
/// Coordinates are meters.
inline Mesh load_ply(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open PLY file: " + path);

    std::string line;
    if (!std::getline(in, line) || line.substr(0, 3) != "ply")
        throw FormatError("not a PLY file: " + path);

    long vertex_count = -1, face_count = -1;
    std::vector<std::string> vertex_props;
    std::string current_element;
    bool ascii = false;

    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "comment" || tok.empty()) continue;
        if (tok == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = (fmt == "ascii");
        } else if (tok == "element") {
            std::string name;
            long count = 0;
            ls >> name >> count;
            current_element = name;
            if (name == "vertex") vertex_count = count;
            if (name == "face") face_count = count;
        } else if (tok == "property") {
            if (current_element == "vertex") {
                std::string type, name;
                ls >> type;
                if (type == "list") throw FormatError("PLY: list property on vertices unsupported");
                ls >> name;
                vertex_props.push_back(name);
            }
        } else if (tok == "end_header") {
            break;
        }
    }
    if (!ascii) throw FormatError("PLY: only ASCII format is supported");
    if (vertex_count < 0 || face_count < 0)
        throw FormatError("PLY: missing vertex or face element");

    auto prop_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < vertex_props.size(); ++i)
            if (vertex_props[i] == name) return static_cast<int>(i);
        return -1;
    };
    const int ix = prop_index("x"), iy = prop_index("y"), iz = prop_index("z");
    const int ir = prop_index("red"), ig = prop_index("green"), ib = prop_index("blue");
    if (ix < 0 || iy < 0 || iz < 0) throw FormatError("PLY: missing x/y/z vertex properties");

    Mesh mesh;
    mesh.vertices.reserve(vertex_count);
    mesh.colors.reserve(vertex_count);
    std::vector<double> vals(vertex_props.size());
    for (long v = 0; v < vertex_count; ++v) {
        for (auto& x : vals)
            if (!(in >> x)) throw FormatError("PLY: truncated vertex data");
        mesh.vertices.emplace_back(vals[ix], vals[iy], vals[iz]);
        Rgb8 c{200, 200, 200};
        if (ir >= 0 && ig >= 0 && ib >= 0)
            c = {static_cast<std::uint8_t>(vals[ir]), static_cast<std::uint8_t>(vals[ig]),
                 static_cast<std::uint8_t>(vals[ib])};
        mesh.colors.push_back(c);
    }
    for (long f = 0; f < face_count; ++f) {
        int n = 0;
        if (!(in >> n) || n < 3) throw FormatError("PLY: bad face vertex count");
        std::vector<int> idx(n);
        for (int& i : idx)
            if (!(in >> i)) throw FormatError("PLY: truncated face data");
        for (int i = 1; i + 1 < n; ++i)
            mesh.triangles.push_back({idx[0], idx[i], idx[i + 1]});
    }
    mesh.finalize();
    return mesh;
}

inline void save_ply(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write PLY file: " + path);
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << mesh.triangles.size() << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";
    out.precision(9);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        const auto& c = mesh.colors[i];
        out << v.x() << " " << v.y() << " " << v.z() << " " << int(c[0]) << " " << int(c[1])
            << " " << int(c[2]) << "\n";
    }
    for (const auto& t : mesh.triangles)
        out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace pv
