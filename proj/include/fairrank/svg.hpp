#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairrank {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<double> ideal_y;  // marked with a red box on the y-axis
  std::vector<ChartSeries> series;
  std::vector<std::string> x_tick_labels;  // categorical x-axis when non-empty
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string svg_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// Minimal self-contained line chart, no plotting dependency. One polyline
// per series, fixed palette, legend on the right, red box at the ideal value
// on the y-axis.
inline std::string render_line_chart(const ChartSpec& spec) {
  if (spec.series.empty()) throw std::invalid_argument("chart needs at least one series");
  static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd",
                                   "#8c564b", "#e377c2", "#17becf", "#7f7f7f"};
  constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

  const double width = 760, height = 480;
  const double ml = 78, mr = 190, mt = 48, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : spec.series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      }
      xmin = std::min(xmin, x); xmax = std::max(xmax, x);
      ymin = std::min(ymin, y); ymax = std::max(ymax, y);
    }
  }
  if (spec.ideal_y) {
    ymin = std::min(ymin, *spec.ideal_y);
    ymax = std::max(ymax, *spec.ideal_y);
  }
  if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
  const double ypad = (ymax - ymin) * 0.06;
  ymin -= ypad; ymax += ypad;

  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::svg_num(width) +
         "\" height=\"" + detail::svg_num(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"24\" font-size=\"15\" "
         "text-anchor=\"middle\">" + detail::xml_escape(spec.title) + "</text>\n";

  // axes
  svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(mt) +
         "\" x2=\"" + detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(mt + ph) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(mt + ph) +
         "\" x2=\"" + detail::svg_num(ml + pw) + "\" y2=\"" + detail::svg_num(mt + ph) +
         "\" stroke=\"black\"/>\n";

  // y ticks
  for (int t = 0; t <= 5; ++t) {
    const double v = ymin + (ymax - ymin) * t / 5.0;
    const double y = sy(v);
    svg += "<line x1=\"" + detail::svg_num(ml - 4) + "\" y1=\"" + detail::svg_num(y) +
           "\" x2=\"" + detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(y) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(y) +
           "\" x2=\"" + detail::svg_num(ml + pw) + "\" y2=\"" + detail::svg_num(y) +
           "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" + detail::svg_num(y + 4) +
           "\" font-size=\"11\" text-anchor=\"end\">" + detail::svg_tick(v) + "</text>\n";
  }

  // x ticks: categorical labels when given, numeric otherwise
  if (!spec.x_tick_labels.empty()) {
    for (std::size_t i = 0; i < spec.x_tick_labels.size(); ++i) {
      const double x = sx(static_cast<double>(i));
      svg += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(mt + ph) +
             "\" x2=\"" + detail::svg_num(x) + "\" y2=\"" + detail::svg_num(mt + ph + 4) +
             "\" stroke=\"black\"/>\n";
      svg += "<text x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(mt + ph + 18) +
             "\" font-size=\"11\" text-anchor=\"middle\">" +
             detail::xml_escape(spec.x_tick_labels[i]) + "</text>\n";
    }
  } else {
    for (int t = 0; t <= 5; ++t) {
      const double v = xmin + (xmax - xmin) * t / 5.0;
      const double x = sx(v);
      svg += "<line x1=\"" + detail::svg_num(x) + "\" y1=\"" + detail::svg_num(mt + ph) +
             "\" x2=\"" + detail::svg_num(x) + "\" y2=\"" + detail::svg_num(mt + ph + 4) +
             "\" stroke=\"black\"/>\n";
      svg += "<text x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(mt + ph + 18) +
             "\" font-size=\"11\" text-anchor=\"middle\">" + detail::svg_tick(v) + "</text>\n";
    }
  }

  svg += "<text x=\"" + detail::svg_num(ml + pw / 2) + "\" y=\"" +
         detail::svg_num(height - 16) + "\" font-size=\"12\" text-anchor=\"middle\">" +
         detail::xml_escape(spec.x_label) + "</text>\n";
  svg += "<text x=\"20\" y=\"" + detail::svg_num(mt + ph / 2) +
         "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         detail::svg_num(mt + ph / 2) + ")\">" + detail::xml_escape(spec.y_label) +
         "</text>\n";

  // ideal marker: red box on the y-axis plus a dashed guide line
  if (spec.ideal_y) {
    const double y = sy(*spec.ideal_y);
    svg += "<rect x=\"" + detail::svg_num(ml - 10) + "\" y=\"" + detail::svg_num(y - 5) +
           "\" width=\"10\" height=\"10\" fill=\"#d62728\"/>\n";
    svg += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(y) +
           "\" x2=\"" + detail::svg_num(ml + pw) + "\" y2=\"" + detail::svg_num(y) +
           "\" stroke=\"#d62728\" stroke-dasharray=\"5,4\" stroke-width=\"1\"/>\n";
  }

  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const char* color = kPalette[s % kPaletteSize];
    std::string pts;
    for (const auto& [x, y] : spec.series[s].points) {
      pts += detail::svg_num(sx(x)) + "," + detail::svg_num(sy(y)) + " ";
      svg += "<circle cx=\"" + detail::svg_num(sx(x)) + "\" cy=\"" + detail::svg_num(sy(y)) +
             "\" r=\"2.6\" fill=\"" + color + "\"/>\n";
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.8\"/>\n";
    const double ly = mt + 14 + 18.0 * static_cast<double>(s);
    svg += "<line x1=\"" + detail::svg_num(width - mr + 12) + "\" y1=\"" + detail::svg_num(ly) +
           "\" x2=\"" + detail::svg_num(width - mr + 36) + "\" y2=\"" + detail::svg_num(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2.5\"/>\n";
    svg += "<text x=\"" + detail::svg_num(width - mr + 42) + "\" y=\"" + detail::svg_num(ly + 4) +
           "\" font-size=\"11\">" + detail::xml_escape(spec.series[s].label) + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace fairrank
