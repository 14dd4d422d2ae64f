#include "hybridsim/cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "hybridsim/errors.hpp"

namespace hybridsim::cli {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;
constexpr std::array<const char*, 4> kColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v)
    {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad()
    {
        if (!(lo < hi)) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
    double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

std::ofstream open(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    return out;
}

void frame(std::ofstream& out, const std::string& title, const std::string& xlabel, const std::string& ylabel,
           const Range& xr, const Range& yr)
{
    out << fmt::format(R"svg(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)svg",
                       kWidth, kHeight)
        << '\n';
    out << fmt::format(R"svg(<rect x="0" y="0" width="{}" height="{}" fill="white"/>)svg", kWidth, kHeight) << '\n';
    out << fmt::format(R"svg(<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>)svg", kWidth / 2, title)
        << '\n';
    out << fmt::format(R"svg(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>)svg", kLeft, kTop,
                       kWidth - kLeft - kRight, kHeight - kTop - kBottom)
        << '\n';
    for (int i = 0; i <= 4; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / 4;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / 4;
        const double px = xr.map(xv, kLeft, kWidth - kRight);
        const double py = yr.map(yv, kHeight - kBottom, kTop);
        out << fmt::format(R"svg(<text x="{:.1f}" y="{}" text-anchor="middle">{:.4g}</text>)svg", px,
                           kHeight - kBottom + 16, xv)
            << '\n';
        out << fmt::format(R"svg(<text x="{}" y="{:.1f}" text-anchor="end">{:.4g}</text>)svg", kLeft - 6, py + 4, yv)
            << '\n';
    }
    out << fmt::format(R"svg(<text x="{}" y="{}" text-anchor="middle">{}</text>)svg", (kLeft + kWidth - kRight) / 2,
                       kHeight - 16, xlabel)
        << '\n';
    out << fmt::format(R"svg(<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>)svg",
                       (kTop + kHeight - kBottom) / 2, (kTop + kHeight - kBottom) / 2, ylabel)
        << '\n';
}

} // namespace

void write_line_plot(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series)
{
    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.x) xr.include(v);
        for (double v : s.y) yr.include(v);
    }
    xr.pad();
    yr.pad();

    auto out = open(path);
    frame(out, title, xlabel, ylabel, xr, yr);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kColours[k % kColours.size()];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            const double px = xr.map(s.x[i], kLeft, kWidth - kRight);
            const double py = yr.map(s.y[i], kHeight - kBottom, kTop);
            if (s.markers) {
                out << fmt::format(R"svg(<circle cx="{:.2f}" cy="{:.2f}" r="3" fill="{}"/>)svg", px, py, colour) << '\n';
            } else {
                pts += fmt::format("{:.2f},{:.2f} ", px, py);
            }
        }
        if (!pts.empty()) {
            out << fmt::format(R"svg(<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>)svg", colour, pts)
                << '\n';
        }
        out << fmt::format(R"svg(<text x="{}" y="{}" fill="{}">{}</text>)svg", kWidth - kRight - 150, kTop + 16 + 16 * k,
                           colour, s.label)
            << '\n';
    }
    out << "</svg>\n";
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

void write_heatmap(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
                   const std::string& ylabel, const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& z)
{
    if (x.size() < 2 || y.size() < 2 || z.size() != x.size() * y.size()) {
        throw Error("heatmap needs at least a 2x2 grid matching z");
    }
    Range xr, yr, zr;
    for (double v : x) xr.include(v);
    for (double v : y) yr.include(v);
    for (double v : z) zr.include(v);
    zr.pad();

    auto out = open(path);
    frame(out, title, xlabel, ylabel, xr, yr);
    const double cw = (kWidth - kLeft - kRight) / double(x.size());
    const double ch = (kHeight - kTop - kBottom) / double(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double t = std::clamp(zr.map(z[j * x.size() + i], 0.0, 1.0), 0.0, 1.0);
            // Dark blue to yellow.
            const int r = static_cast<int>(255 * t);
            const int g = static_cast<int>(40 + 200 * t);
            const int b = static_cast<int>(120 * (1 - t));
            out << fmt::format(R"svg(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="rgb({},{},{})"/>)svg",
                               kLeft + cw * double(i), kHeight - kBottom - ch * double(j + 1), cw + 0.05, ch + 0.05, r,
                               g, b)
                << '\n';
        }
    }
    out << "</svg>\n";
    if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

} // namespace hybridsim::cli
