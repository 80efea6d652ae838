#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace flcli {

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool lines = false;  // polyline when set, scatter dots otherwise
};

// Self-contained deterministic SVG: fixed canvas, fixed palette, fixed number
// formatting, no external fonts or libraries.
void write_svg_plot(std::ostream& os, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<SvgSeries>& series);

}  // namespace flcli
