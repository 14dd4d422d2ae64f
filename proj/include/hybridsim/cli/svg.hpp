#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hybridsim::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;
};

// Minimal self-contained plots; no fonts or scripts beyond plain SVG text.
void write_line_plot(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series);

// z is row-major with ny rows of nx values; colour scale is linear in z.
void write_heatmap(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
                   const std::string& ylabel, const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& z);

} // namespace hybridsim::cli
