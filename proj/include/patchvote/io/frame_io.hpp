// patchvote/io/frame_io.hpp — on-disk scene format.
//
// A scene directory holds:
//   intrinsics.txt            key = value (fx, fy, cx, cy, width, height)
//   frame_000000.color.png    8-bit RGB
//   frame_000000.depth.png    16-bit grayscale, millimeters, 0 = invalid
//   gt.txt                    optional: frame id qw qx qy qz tx ty tz
#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "patchvote/core/image.hpp"
#include "patchvote/core/pose.hpp"
#include "patchvote/io/config.hpp"
#include "patchvote/io/png.hpp"

namespace pv {

inline std::string frame_basename(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%06d", index);
    return buf;
}

inline void save_intrinsics(const std::string& path, const CameraIntrinsics& K) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write intrinsics: " + path);
    out.precision(12);
    out << "fx = " << K.fx << "\nfy = " << K.fy << "\ncx = " << K.cx << "\ncy = " << K.cy
        << "\nwidth = " << K.width << "\nheight = " << K.height << "\n";
}

inline CameraIntrinsics load_intrinsics(const std::string& path) {
    const ConfigFile cfg = ConfigFile::load(path);
    CameraIntrinsics K;
    K.fx = cfg.get_double("fx", 0);
    K.fy = cfg.get_double("fy", 0);
    K.cx = cfg.get_double("cx", 0);
    K.cy = cfg.get_double("cy", 0);
    K.width = static_cast<int>(cfg.get_int("width", 0));
    K.height = static_cast<int>(cfg.get_int("height", 0));
    K.require_valid();
    return K;
}

inline void save_frame(const std::string& dir, int index, const RgbdFrame& frame) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string base = dir + "/" + frame_basename(index);
    save_png_rgb8(base + ".color.png", frame.color);

    Image<std::uint16_t> mm(frame.depth.width(), frame.depth.height());
    for (int y = 0; y < mm.height(); ++y)
        for (int x = 0; x < mm.width(); ++x) {
            const float d = frame.depth.at(x, y);
            const long v = d > 0 ? std::lround(d * 1000.0) : 0;
            mm.at(x, y) = static_cast<std::uint16_t>(std::clamp(v, 0L, 65535L));
        }
    save_png_gray16(base + ".depth.png", mm);
}

inline RgbdFrame load_frame(const std::string& dir, int index, const CameraIntrinsics& K) {
    const std::string base = dir + "/" + frame_basename(index);
    RgbdFrame frame;
    frame.intrinsics = K;
    frame.color = load_png_rgb8(base + ".color.png");
    const Image<std::uint16_t> mm = load_png_gray16(base + ".depth.png");
    frame.depth = Image<float>(mm.width(), mm.height());
    for (int y = 0; y < mm.height(); ++y)
        for (int x = 0; x < mm.width(); ++x)
            frame.depth.at(x, y) = mm.at(x, y) == 0 ? 0.0f : mm.at(x, y) / 1000.0f;
    frame.require_consistent();
    return frame;
}

/// Frame indices present in a scene directory, ascending.
inline std::vector<int> list_frames(const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<int> indices;
    if (!fs::is_directory(dir)) throw IoError("not a scene directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (!name.starts_with("frame_") || !name.ends_with(".color.png")) continue;
        const std::string digits = name.substr(6, name.size() - 6 - 10);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) continue;
        indices.push_back(std::stoi(digits));
    }
    std::sort(indices.begin(), indices.end());
    return indices;
}

struct GroundTruthEntry {
    std::uint32_t object_id = 0;
    Pose pose;
};

/// Per-frame ground truth poses.
using GroundTruth = std::map<int, std::vector<GroundTruthEntry>>;

inline void save_ground_truth(const std::string& path, const GroundTruth& gt) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write ground truth: " + path);
    out << "# frame id qw qx qy qz tx ty tz\n";
    out.precision(12);
    for (const auto& [frame, entries] : gt)
        for (const auto& e : entries) {
            const auto& q = e.pose.rotation();
            const auto& t = e.pose.translation();
            out << frame << " " << e.object_id << " " << q.w() << " " << q.x() << " " << q.y()
                << " " << q.z() << " " << t.x() << " " << t.y() << " " << t.z() << "\n";
        }
}

inline GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ground truth: " + path);
    GroundTruth gt;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int frame;
        std::uint32_t id;
        double qw, qx, qy, qz, tx, ty, tz;
        if (!(ls >> frame >> id)) continue;
        if (!(ls >> qw >> qx >> qy >> qz >> tx >> ty >> tz))
            throw FormatError("bad ground truth line in " + path + ": " + line);
        gt[frame].push_back({id, Pose(Eigen::Quaterniond(qw, qx, qy, qz), {tx, ty, tz})});
    }
    return gt;
}

}  // namespace pv
