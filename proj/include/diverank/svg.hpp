#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "diverank/errors.hpp"

namespace diverank {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y) in data space
};

// A single line/scatter chart. Reference lines are dashed and sit at fixed
// data coordinates (used for baseline markers).
struct ChartSpec {
  std::string title;
  std::string subtitle;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
  std::vector<double> ref_x;  // vertical dashed lines
  std::vector<double> ref_y;  // horizontal dashed lines
  bool connect = true;        // polyline through points (markers always drawn)
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Linear data-to-pixel mapping with a padded range; collapses to a centered
// span when the data extent is a single value.
class Scale {
 public:
  Scale(double lo, double hi, double px_lo, double px_hi)
      : px_lo_(px_lo), px_hi_(px_hi) {
    if (!(hi > lo)) {
      const double pad = std::max(0.5, std::fabs(lo) * 0.1);
      lo -= pad;
      hi += pad;
    } else {
      const double pad = (hi - lo) * 0.05;
      lo -= pad;
      hi += pad;
    }
    lo_ = lo;
    hi_ = hi;
  }
  double operator()(double v) const {
    return px_lo_ + (v - lo_) / (hi_ - lo_) * (px_hi_ - px_lo_);
  }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_, px_lo_, px_hi_;
};

}  // namespace detail

// Plain-text SVG, no external assets. Layout is fixed-size; series get
// colors from a small rotating palette and a right-hand legend.
inline void write_svg_chart(std::ostream& out, const ChartSpec& spec) {
  if (spec.series.empty()) throw DataError("chart has no series");
  bool any_point = false;
  for (const ChartSeries& s : spec.series) any_point |= !s.points.empty();
  if (!any_point) throw DataError("chart has no points");

  static const char* palette[] = {"#1b6ca8", "#d1495b", "#2e933c",
                                  "#e09f3e", "#6d597a", "#37718e"};
  constexpr int palette_size = 6;
  const double width = 640, height = 420;
  const double px_left = 70, px_right = 470, px_top = 60, px_bottom = 370;

  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  const auto absorb = [&](double x, double y) {
    if (first) {
      xmin = xmax = x;
      ymin = ymax = y;
      first = false;
    } else {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  };
  for (const ChartSeries& s : spec.series) {
    for (const auto& [x, y] : s.points) absorb(x, y);
  }
  for (const double x : spec.ref_x) absorb(x, ymin);
  for (const double y : spec.ref_y) absorb(xmin, y);

  const detail::Scale sx(xmin, xmax, px_left, px_right);
  const detail::Scale sy(ymin, ymax, px_bottom, px_top);  // y grows upward

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2
      << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << detail::xml_escape(spec.title) << "</text>\n";
  if (!spec.subtitle.empty()) {
    out << "<text x=\"" << width / 2
        << "\" y=\"42\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\" fill=\"#555\">"
        << detail::xml_escape(spec.subtitle) << "</text>\n";
  }

  // Axes and ticks.
  out << "<line x1=\"" << px_left << "\" y1=\"" << px_bottom << "\" x2=\""
      << px_right << "\" y2=\"" << px_bottom
      << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << px_left << "\" y1=\"" << px_top << "\" x2=\""
      << px_left << "\" y2=\"" << px_bottom
      << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = sx.lo() + (sx.hi() - sx.lo()) * t / 4.0;
    const double fy = sy.lo() + (sy.hi() - sy.lo()) * t / 4.0;
    const double px = sx(fx);
    const double py = sy(fy);
    out << "<line x1=\"" << detail::num(px) << "\" y1=\"" << px_bottom
        << "\" x2=\"" << detail::num(px) << "\" y2=\"" << px_bottom + 4
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << detail::num(px) << "\" y=\"" << px_bottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << detail::tick_label(fx) << "</text>\n";
    out << "<line x1=\"" << px_left - 4 << "\" y1=\"" << detail::num(py)
        << "\" x2=\"" << px_left << "\" y2=\"" << detail::num(py)
        << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << px_left - 7 << "\" y=\"" << detail::num(py + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << detail::tick_label(fy) << "</text>\n";
  }
  out << "<text x=\"" << (px_left + px_right) / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << detail::xml_escape(spec.x_label) << "</text>\n";
  out << "<text x=\"18\" y=\"" << (px_top + px_bottom) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 18 "
      << (px_top + px_bottom) / 2 << ")\">" << detail::xml_escape(spec.y_label)
      << "</text>\n";

  for (const double x : spec.ref_x) {
    out << "<line x1=\"" << detail::num(sx(x)) << "\" y1=\"" << px_top
        << "\" x2=\"" << detail::num(sx(x)) << "\" y2=\"" << px_bottom
        << "\" stroke=\"#777\" stroke-width=\"1\" "
           "stroke-dasharray=\"4 3\"/>\n";
  }
  for (const double y : spec.ref_y) {
    out << "<line x1=\"" << px_left << "\" y1=\"" << detail::num(sy(y))
        << "\" x2=\"" << px_right << "\" y2=\"" << detail::num(sy(y))
        << "\" stroke=\"#777\" stroke-width=\"1\" "
           "stroke-dasharray=\"4 3\"/>\n";
  }

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const char* color = palette[s % palette_size];
    const ChartSeries& series = spec.series[s];
    if (spec.connect && series.points.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t p = 0; p < series.points.size(); ++p) {
        if (p > 0) out << " ";
        out << detail::num(sx(series.points[p].first)) << ","
            << detail::num(sy(series.points[p].second));
      }
      out << "\"/>\n";
    }
    for (const auto& [x, y] : series.points) {
      out << "<circle cx=\"" << detail::num(sx(x)) << "\" cy=\""
          << detail::num(sy(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = px_top + 8 + 18.0 * static_cast<double>(s);
    out << "<line x1=\"" << px_right + 14 << "\" y1=\"" << detail::num(ly)
        << "\" x2=\"" << px_right + 34 << "\" y2=\"" << detail::num(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << px_right + 39 << "\" y=\"" << detail::num(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::xml_escape(series.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace diverank
