// patchvote/io/chart.hpp — tiny line-chart PNG writer for sweep/report plots.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "patchvote/core/image.hpp"
#include "patchvote/io/png.hpp"

namespace pv {

struct ChartSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

namespace chart_detail {

// 5x7 glyphs for the characters tick labels can contain.
inline const std::uint8_t* glyph(char ch) {
    static const std::uint8_t digits[13][7] = {
        {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e},  // 0
        {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e},  // 1
        {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f},  // 2
        {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e},  // 3
        {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02},  // 4
        {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e},  // 5
        {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e},  // 6
        {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
        {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e},  // 8
        {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c},  // 9
        {0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00},  // -
        {0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c},  // .
        {0x00, 0x00, 0x0e, 0x11, 0x1f, 0x10, 0x0e},  // e
    };
    if (ch >= '0' && ch <= '9') return digits[ch - '0'];
    if (ch == '-') return digits[10];
    if (ch == '.') return digits[11];
    if (ch == 'e' || ch == 'E' || ch == '+') return digits[12];  // '+' drawn as e; rare
    return nullptr;
}

inline void draw_text(Image<Rgb8>& img, int x, int y, const std::string& text, Rgb8 color) {
    for (char ch : text) {
        const std::uint8_t* g = glyph(ch);
        if (g) {
            for (int r = 0; r < 7; ++r)
                for (int c = 0; c < 5; ++c)
                    if ((g[r] >> (4 - c)) & 1) {
                        if (img.contains(x + c, y + r)) img.at(x + c, y + r) = color;
                    }
        }
        x += 6;
    }
}

inline void draw_line(Image<Rgb8>& img, int x0, int y0, int x1, int y1, Rgb8 color) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (img.contains(x0, y0)) img.at(x0, y0) = color;
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace chart_detail

/// Writes a line chart of the given series. Axes are linear with five ticks
/// per axis; each series gets a distinct color and a small legend swatch.
inline void write_line_chart_png(const std::string& path, const std::vector<ChartSeries>& series,
                                 int width = 640, int height = 420) {
    using namespace chart_detail;
    Image<Rgb8> img(width, height, Rgb8{255, 255, 255});

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    const int ml = 56, mr = 16, mt = 16, mb = 36;
    const int x0 = ml, x1 = width - mr, y0 = height - mb, y1 = mt;
    auto sx = [&](double x) {
        return static_cast<int>(std::lround(x0 + (x - xmin) / (xmax - xmin) * (x1 - x0)));
    };
    auto sy = [&](double y) {
        return static_cast<int>(std::lround(y0 + (y - ymin) / (ymax - ymin) * (y1 - y0)));
    };

    const Rgb8 axis{40, 40, 40}, grid{220, 220, 220};
    for (int i = 0; i <= 4; ++i) {
        const double tx = xmin + (xmax - xmin) * i / 4;
        const double ty = ymin + (ymax - ymin) * i / 4;
        draw_line(img, sx(tx), y0, sx(tx), y1, grid);
        draw_line(img, x0, sy(ty), x1, sy(ty), grid);
        draw_text(img, sx(tx) - 10, y0 + 6, tick_label(tx), axis);
        draw_text(img, 4, sy(ty) - 3, tick_label(ty), axis);
    }
    draw_line(img, x0, y0, x1, y0, axis);
    draw_line(img, x0, y0, x0, y1, axis);

    static const Rgb8 palette[6] = {{200, 40, 40},  {40, 100, 200}, {40, 160, 60},
                                    {200, 140, 20}, {140, 60, 180}, {20, 160, 160}};
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const Rgb8 color = palette[si % 6];
        for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
            draw_line(img, sx(s.x[i]), sy(s.y[i]), sx(s.x[i + 1]), sy(s.y[i + 1]), color);
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const int px = sx(s.x[i]), py = sy(s.y[i]);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (img.contains(px + dx, py + dy)) img.at(px + dx, py + dy) = color;
        }
        // Legend swatch, top-right corner.
        const int ly = mt + static_cast<int>(si) * 10;
        for (int dy = 0; dy < 6; ++dy)
            for (int dx = 0; dx < 6; ++dx)
                if (img.contains(x1 - 60 + dx, ly + dy)) img.at(x1 - 60 + dx, ly + dy) = color;
    }
    save_png_rgb8(path, img);
}

}  // namespace pv
