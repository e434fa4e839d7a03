#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tlsloss::io {

struct SvgSeries {
  std::string name;
  std::vector<double> x, y;
  bool markers = false;  // points instead of a polyline
};

struct SvgPlot {
  std::string title, x_label, y_label;
  bool log_x = false, log_y = false;
  std::vector<SvgSeries> series;
};

// Minimal static line/scatter plot for quick looks. Non-finite points (and
// non-positive ones on log axes) are skipped.
std::string render_svg(const SvgPlot& plot);
void write_svg(const std::filesystem::path& path, const SvgPlot& plot);

}  // namespace tlsloss::io
