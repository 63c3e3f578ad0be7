// patchvote/net/report.hpp — side-by-side reconstruction report.
//
// Emits a PNG grid (one row per patch: input tile, then one reconstruction
// tile per regressor) and a CSV of per-patch MSEs. A tile shows the RGB
// channels next to the depth channel rendered as grayscale.
#pragma once

#include <string>
#include <vector>

#include "patchvote/io/csv.hpp"
#include "patchvote/io/png.hpp"
#include "patchvote/net/regressor.hpp"

namespace pv {

namespace report_detail {

inline std::uint8_t to_byte(float v) {
    return static_cast<std::uint8_t>(std::clamp<long>(std::lround((v + 1.0f) * 127.5f), 0, 255));
}

/// Draws a 64x32 tile: RGB on the left, depth as gray on the right.
inline void draw_tile(Image<Rgb8>& img, int x0, int y0, const float* values) {
    const int n = Patch::kSize;
    auto at = [&](int c, int y, int x) { return values[(c * n + y) * n + x]; };
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            img.at(x0 + x, y0 + y) = {to_byte(at(0, y, x)), to_byte(at(1, y, x)),
                                      to_byte(at(2, y, x))};
            const std::uint8_t d = to_byte(at(3, y, x));
            img.at(x0 + n + x, y0 + y) = {d, d, d};
        }
}

}  // namespace report_detail

struct NamedRegressor {
    std::string name;
    const Regressor* regressor;
};

/// Returns the per-regressor mean MSE over the given patches.
inline std::vector<double> reconstruction_report(const std::vector<NamedRegressor>& regressors,
                                                 const std::vector<Patch>& patches,
                                                 const std::string& png_path,
                                                 const std::string& csv_path) {
    const int tile_w = 2 * Patch::kSize + 4;
    const int tile_h = Patch::kSize + 4;
    const int cols = 1 + static_cast<int>(regressors.size());
    Image<Rgb8> grid(cols * tile_w + 4, static_cast<int>(patches.size()) * tile_h + 4,
                     Rgb8{30, 30, 30});

    std::vector<std::string> header = {"patch"};
    for (const auto& nr : regressors) header.push_back("mse_" + nr.name);
    CsvWriter csv(csv_path, header);

    std::vector<double> mean_mse(regressors.size(), 0.0);
    for (std::size_t p = 0; p < patches.size(); ++p) {
        const int y0 = static_cast<int>(p) * tile_h + 4;
        report_detail::draw_tile(grid, 4, y0, patches[p].data.data());
        std::vector<std::string> row = {std::to_string(p)};
        for (std::size_t r = 0; r < regressors.size(); ++r) {
            const auto [desc, recon] = regressors[r].regressor->forward(patches[p]);
            report_detail::draw_tile(grid, (static_cast<int>(r) + 1) * tile_w + 4, y0,
                                     recon.data());
            double mse = 0.0;
            for (int i = 0; i < Patch::kValues; ++i) {
                const double d = recon(i) - patches[p].data[i];
                mse += d * d;
            }
            mse /= Patch::kValues;
            mean_mse[r] += mse / static_cast<double>(patches.size());
            row.push_back(csv_num(mse));
        }
        csv.row(row);
    }
    save_png_rgb8(png_path, grid);
    return mean_mse;
}

}  // namespace pv
