#pragma once

#include <string>
#include <vector>

namespace mr {

struct SvgSeries {
  std::string label;
  std::string color;  // e.g. "#1f77b4"
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line plot written as standalone SVG markup; non-finite points are
/// dropped from the polylines.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series);

}  // namespace mr
