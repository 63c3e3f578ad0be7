// patchvote/io/png.hpp — minimal PNG codec over zlib.
//
// Supports exactly what the pipeline stores: 8-bit RGB (color frames, plots)
// and 16-bit grayscale (depth in millimeters). The decoder handles all five
// scanline filters; the encoder always writes filter 0.
#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "patchvote/core/errors.hpp"
#include "patchvote/core/image.hpp"

namespace pv {
namespace png_detail {

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline void write_chunk(std::ofstream& out, const char type[4],
                        const std::vector<std::uint8_t>& data) {
    std::vector<std::uint8_t> head;
    put_be32(head, static_cast<std::uint32_t>(data.size()));
    out.write(reinterpret_cast<const char*>(head.data()), 4);
    out.write(type, 4);
    if (!data.empty())
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size()));
    std::uint32_t crc = crc32(0, reinterpret_cast<const Bytef*>(type), 4);
    if (!data.empty()) crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
    std::vector<std::uint8_t> tail;
    put_be32(tail, crc);
    out.write(reinterpret_cast<const char*>(tail.data()), 4);
}

inline void write_png(const std::string& path, int width, int height, int bit_depth,
                      int color_type, const std::vector<std::uint8_t>& raw_rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write PNG: " + path);
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    out.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(static_cast<std::uint8_t>(bit_depth));
    ihdr.push_back(static_cast<std::uint8_t>(color_type));
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    write_chunk(out, "IHDR", ihdr);

    uLongf bound = compressBound(static_cast<uLong>(raw_rows.size()));
    std::vector<std::uint8_t> idat(bound);
    if (compress2(idat.data(), &bound, raw_rows.data(), static_cast<uLong>(raw_rows.size()), 6) !=
        Z_OK)
        throw IoError("PNG deflate failed: " + path);
    idat.resize(bound);
    write_chunk(out, "IDAT", idat);
    write_chunk(out, "IEND", {});
    if (!out) throw IoError("write failed: " + path);
}

struct PngData {
    int width = 0, height = 0, bit_depth = 0, color_type = 0;
    std::vector<std::uint8_t> pixels;  // unfiltered scanlines, no filter bytes
};

inline int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

inline PngData read_png(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open PNG: " + path);
    std::vector<std::uint8_t> file((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (file.size() < 8 || std::memcmp(file.data(), sig, 8) != 0)
        throw FormatError("not a PNG file: " + path, 0);

    auto be32 = [&](std::size_t off) {
        return (std::uint32_t(file[off]) << 24) | (std::uint32_t(file[off + 1]) << 16) |
               (std::uint32_t(file[off + 2]) << 8) | std::uint32_t(file[off + 3]);
    };

    PngData png;
    std::vector<std::uint8_t> compressed;
    std::size_t off = 8;
    bool saw_end = false;
    while (off + 8 <= file.size()) {
        const std::uint32_t len = be32(off);
        if (off + 12 + len > file.size()) throw FormatError("truncated PNG chunk: " + path, off);
        const char* type = reinterpret_cast<const char*>(&file[off + 4]);
        const std::uint8_t* data = &file[off + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            png.width = static_cast<int>(be32(off + 8));
            png.height = static_cast<int>(be32(off + 12));
            png.bit_depth = data[8];
            png.color_type = data[9];
            if (data[12] != 0) throw FormatError("interlaced PNG unsupported: " + path, off);
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            compressed.insert(compressed.end(), data, data + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_end = true;
            break;
        }
        off += 12 + len;
    }
    if (png.width <= 0 || png.height <= 0) throw FormatError("PNG missing IHDR: " + path, 8);
    if (!saw_end) throw FormatError("PNG missing IEND: " + path, file.size());

    int channels = 0;
    switch (png.color_type) {
        case 0: channels = 1; break;
        case 2: channels = 3; break;
        default: throw FormatError("unsupported PNG color type: " + path, 0);
    }
    const int bpp = channels * png.bit_depth / 8;
    const std::size_t stride = static_cast<std::size_t>(png.width) * bpp;
    const std::size_t raw_size = (stride + 1) * png.height;

    std::vector<std::uint8_t> raw(raw_size);
    uLongf out_len = static_cast<uLongf>(raw_size);
    if (uncompress(raw.data(), &out_len, compressed.data(),
                   static_cast<uLong>(compressed.size())) != Z_OK ||
        out_len != raw_size)
        throw FormatError("PNG inflate failed: " + path, 0);

    png.pixels.assign(stride * png.height, 0);
    std::vector<std::uint8_t> prev(stride, 0);
    for (int y = 0; y < png.height; ++y) {
        const std::uint8_t filter = raw[(stride + 1) * y];
        const std::uint8_t* src = &raw[(stride + 1) * y + 1];
        std::uint8_t* dst = &png.pixels[stride * y];
        for (std::size_t x = 0; x < stride; ++x) {
            const int a = x >= static_cast<std::size_t>(bpp) ? dst[x - bpp] : 0;
            const int b = prev[x];
            const int c = x >= static_cast<std::size_t>(bpp) ? prev[x - bpp] : 0;
            int v = src[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw FormatError("bad PNG filter type: " + path, 0);
            }
            dst[x] = static_cast<std::uint8_t>(v);
        }
        std::memcpy(prev.data(), dst, stride);
    }
    return png;
}

}  // namespace png_detail

inline void save_png_rgb8(const std::string& path, const Image<Rgb8>& img) {
    const std::size_t stride = static_cast<std::size_t>(img.width()) * 3;
    std::vector<std::uint8_t> rows((stride + 1) * img.height());
    for (int y = 0; y < img.height(); ++y) {
        std::uint8_t* row = &rows[(stride + 1) * y];
        row[0] = 0;  // filter: none
        for (int x = 0; x < img.width(); ++x) {
            const Rgb8& c = img.at(x, y);
            row[1 + x * 3] = c[0];
            row[2 + x * 3] = c[1];
            row[3 + x * 3] = c[2];
        }
    }
    png_detail::write_png(path, img.width(), img.height(), 8, 2, rows);
}

inline Image<Rgb8> load_png_rgb8(const std::string& path) {
    const auto png = png_detail::read_png(path);
    if (png.color_type != 2 || png.bit_depth != 8)
        throw FormatError("expected 8-bit RGB PNG: " + path, 0);
    Image<Rgb8> img(png.width, png.height);
    for (int y = 0; y < png.height; ++y)
        for (int x = 0; x < png.width; ++x) {
            const std::uint8_t* p = &png.pixels[(static_cast<std::size_t>(y) * png.width + x) * 3];
            img.at(x, y) = {p[0], p[1], p[2]};
        }
    return img;
}

inline void save_png_gray16(const std::string& path, const Image<std::uint16_t>& img) {
    const std::size_t stride = static_cast<std::size_t>(img.width()) * 2;
    std::vector<std::uint8_t> rows((stride + 1) * img.height());
    for (int y = 0; y < img.height(); ++y) {
        std::uint8_t* row = &rows[(stride + 1) * y];
        row[0] = 0;
        for (int x = 0; x < img.width(); ++x) {
            const std::uint16_t v = img.at(x, y);
            row[1 + x * 2] = static_cast<std::uint8_t>(v >> 8);  // big-endian samples
            row[2 + x * 2] = static_cast<std::uint8_t>(v & 0xff);
        }
    }
    png_detail::write_png(path, img.width(), img.height(), 16, 0, rows);
}

inline Image<std::uint16_t> load_png_gray16(const std::string& path) {
    const auto png = png_detail::read_png(path);
    if (png.color_type != 0 || png.bit_depth != 16)
        throw FormatError("expected 16-bit grayscale PNG: " + path, 0);
    Image<std::uint16_t> img(png.width, png.height);
    for (int y = 0; y < png.height; ++y)
        for (int x = 0; x < png.width; ++x) {
            const std::uint8_t* p = &png.pixels[(static_cast<std::size_t>(y) * png.width + x) * 2];
            img.at(x, y) = static_cast<std::uint16_t>((p[0] << 8) | p[1]);
        }
    return img;
}

}  // namespace pv
