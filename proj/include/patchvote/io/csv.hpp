// patchvote/io/csv.hpp — CSV emission with stable numeric formatting.
#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "patchvote/core/errors.hpp"

namespace pv {

/// Shortest-ish round-trippable formatting; identical input bits always give
/// identical text, which the determinism checks rely on.
inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path), path_(path) {
        if (!out_) throw IoError("cannot write CSV: " + path);
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
        if (!out_) throw IoError("CSV write failed: " + path_);
    }

private:
    std::ofstream out_;
    std::string path_;
};

}  // namespace pv
