#include "sgps/harness/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sgps::harness {
namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 320.0;
constexpr double kMargin = 50.0;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

bool usable(double v, bool log_axis) { return std::isfinite(v) && (!log_axis || v > 0.0); }

void draw(std::ostringstream& svg, const Chart& chart, double ox) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !usable(s.y[i], chart.log_y)) continue;
      const double y = chart.log_y ? std::log10(s.y[i]) : s.y[i];
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  const double pw = kWidth - 2 * kMargin;
  const double ph = kHeight - 2 * kMargin;
  auto px = [&](double x) { return ox + kMargin + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kMargin + ph - (y - ymin) / (ymax - ymin) * ph; };

  svg << "<text x=\"" << num(ox + kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(chart.title) << "</text>\n";
  svg << "<rect x=\"" << num(ox + kMargin) << "\" y=\"" << num(kMargin) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    svg << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(kMargin + ph + 14)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(fx) << "</text>\n";
    svg << "<text x=\"" << num(ox + kMargin - 4) << "\" y=\"" << num(py(fy) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << tick(chart.log_y ? std::pow(10.0, fy) : fy)
        << "</text>\n";
  }
  svg << "<text x=\"" << num(ox + kWidth / 2) << "\" y=\"" << num(kHeight - 10)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(chart.x_label) << "</text>\n";
  svg << "<text x=\"" << num(ox + 12) << "\" y=\"" << num(kHeight / 2) << "\" font-size=\"11\" transform=\"rotate(-90 "
      << num(ox + 12) << ' ' << num(kHeight / 2) << ")\" text-anchor=\"middle\">" << escape(chart.y_label)
      << "</text>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
            << "\"/>\n";
      }
      points.clear();
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !usable(s.y[i], chart.log_y)) {
        flush();
        continue;
      }
      const double y = chart.log_y ? std::log10(s.y[i]) : s.y[i];
      points += num(px(s.x[i])) + "," + num(py(y)) + " ";
    }
    flush();
    svg << "<text x=\"" << num(ox + kMargin + 6) << "\" y=\"" << num(kMargin + 14 + 13.0 * static_cast<double>(k))
        << "\" font-size=\"10\" fill=\"" << color << "\">" << escape(s.label) << "</text>\n";
  }
}

std::string document(double width, const std::string& body) {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(kHeight)
      << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body << "</svg>\n";
  return svg.str();
}

}  // namespace

std::string render_svg(const Chart& chart) {
  std::ostringstream body;
  draw(body, chart, 0.0);
  return document(kWidth, body.str());
}

std::string render_svg_pair(const Chart& left, const Chart& right) {
  std::ostringstream body;
  draw(body, left, 0.0);
  draw(body, right, kWidth);
  return document(2 * kWidth, body.str());
}

}  // namespace sgps::harness
