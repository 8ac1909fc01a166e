#pragma once

#include <string>
#include <vector>

namespace sgps::harness {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<Series> series;
};

/// Polyline chart. Non-finite points (and non-positive ones on a log axis)
/// break the line.
std::string render_svg(const Chart& chart);
/// Two charts side by side in one document.
std::string render_svg_pair(const Chart& left, const Chart& right);

}  // namespace sgps::harness
