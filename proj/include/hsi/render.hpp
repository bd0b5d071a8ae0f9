#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hsi/cube.hpp"
#include "hsi/error.hpp"

namespace hsi {

// False-color composite from three bands, values clamped to [0, 1],
// written as binary PPM (P6).
inline void write_false_color(const Cube& cube, const std::array<int, 3>& bands,
                              const std::string& path) {
    for (int b : bands)
        if (b < 0 || b >= cube.bands)
            throw ConfigError("render band " + std::to_string(b) + " out of range [0, " +
                              std::to_string(cube.bands) + ")");
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FileError("cannot write image: " + path);
    f << "P6\n" << cube.width << " " << cube.height << "\n255\n";
    std::vector<unsigned char> row(static_cast<std::size_t>(cube.width) * 3);
    for (int r = 0; r < cube.height; ++r) {
        for (int c = 0; c < cube.width; ++c)
            for (int ch = 0; ch < 3; ++ch) {
                const float v = std::clamp(cube.at(r, c, bands[static_cast<std::size_t>(ch)]), 0.0f, 1.0f);
                row[static_cast<std::size_t>(c) * 3 + ch] =
                    static_cast<unsigned char>(std::lround(v * 255.0f));
            }
        f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
}

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

// Minimal SVG line plot: axes, ticks, one polyline per series, legend.
// Degenerate series (single point) render as a marker.
inline void write_svg_plot(const std::string& path, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           const std::vector<PlotSeries>& series) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    const int width = 720, height = 480, ml = 70, mr = 20, mt = 40, mb = 55;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) { xmin = 0; xmax = 1; }
    if (ymin > ymax) { ymin = 0; ymax = 1; }
    if (xmax == xmin) { xmax = xmin + 1; xmin -= 1; }
    if (ymax == ymin) { ymax = ymin + 0.5; ymin -= 0.5; }
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(path);
    if (!f) throw FileError("cannot write plot: " + path);
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' font-family='sans-serif' font-size='12'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << width / 2 << "' y='20' text-anchor='middle' font-size='15'>" << title
      << "</text>\n";
    // axes
    f << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
      << "' stroke='black'/>\n"
      << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 5.0;
        const double yv = ymin + (ymax - ymin) * i / 5.0;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4g", xv);
        f << "<line x1='" << px(xv) << "' y1='" << mt + ph << "' x2='" << px(xv) << "' y2='"
          << mt + ph + 4 << "' stroke='black'/>\n"
          << "<text x='" << px(xv) << "' y='" << mt + ph + 18 << "' text-anchor='middle'>" << buf
          << "</text>\n";
        std::snprintf(buf, sizeof(buf), "%.4g", yv);
        f << "<line x1='" << ml - 4 << "' y1='" << py(yv) << "' x2='" << ml << "' y2='" << py(yv)
          << "' stroke='black'/>\n"
          << "<text x='" << ml - 8 << "' y='" << py(yv) + 4 << "' text-anchor='end'>" << buf
          << "</text>\n";
    }
    f << "<text x='" << ml + pw / 2 << "' y='" << height - 12 << "' text-anchor='middle'>" << xlabel
      << "</text>\n"
      << "<text x='18' y='" << mt + ph / 2 << "' text-anchor='middle' transform='rotate(-90 18 "
      << mt + ph / 2 << ")'>" << ylabel << "</text>\n";

    int ci = 0;
    for (const auto& s : series) {
        const char* color = kColors[ci % 8];
        if (s.x.size() == 1) {
            f << "<circle cx='" << px(s.x[0]) << "' cy='" << py(s.y[0]) << "' r='4' fill='" << color
              << "'/>\n";
        } else if (!s.x.empty()) {
            f << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.y[i])) continue;
                f << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
            f << "'/>\n";
        }
        f << "<rect x='" << ml + pw - 150 << "' y='" << mt + 8 + 18 * ci << "' width='14' height='4' fill='"
          << color << "'/>\n"
          << "<text x='" << ml + pw - 130 << "' y='" << mt + 14 + 18 * ci << "'>" << s.label
          << "</text>\n";
        ++ci;
    }
    f << "</svg>\n";
}

} // namespace hsi
