#pragma once

// Minimal SVG figures: line/scatter plots and heatmaps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nldd/error.hpp"

namespace nldd::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool line = true;
  bool markers = false;
  std::string color;  // empty picks from the palette
  double opacity = 1.0;
};

struct Plot {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  int width = 720, height = 460;
};

struct Heatmap {
  std::string title, xlabel, ylabel;
  std::vector<double> x, y;              // cell centres
  std::vector<std::vector<double>> z;    // z[row = y index][col = x index]
  int width = 720, height = 460;
};

namespace detail {

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return colors[i % 10];
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

/// Round tick positions covering [lo, hi].
inline std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(t);
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double left = 80, right = 24, top = 40, bottom = 56;
  int width, height;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

inline void widen(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
    lo -= pad;
    hi += pad;
  }
}

inline void axes(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& xl,
                 const std::string& yl) {
  os << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.width - f.left - f.right)
     << "\" height=\"" << num(f.height - f.top - f.bottom) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (double t : ticks(f.x0, f.x1)) {
    const double x = f.px(t);
    os << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.height - f.bottom) << "\" x2=\"" << num(x) << "\" y2=\""
       << num(f.height - f.bottom + 5) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << num(x) << "\" y=\"" << num(f.height - f.bottom + 18) << "\" text-anchor=\"middle\">"
       << label(t) << "</text>\n";
  }
  for (double t : ticks(f.y0, f.y1)) {
    const double y = f.py(t);
    os << "<line x1=\"" << num(f.left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(f.left) << "\" y2=\"" << num(y)
       << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << num(f.left - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << label(t)
       << "</text>\n";
  }
  os << "<text x=\"" << num(f.width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
     << "</text>\n";
  os << "<text x=\"" << num((f.left + f.width - f.right) / 2.0) << "\" y=\"" << num(f.height - 14.0)
     << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
  os << "<text transform=\"translate(18," << num((f.top + f.height - f.bottom) / 2.0)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
}

inline std::string header(int w, int h) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

}  // namespace detail

inline std::string render(const Plot& p) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : p.series) {
    if (s.x.size() != s.y.size()) throw ContractError("svg: series '" + s.label + "' has mismatched x/y");
    for (double v : s.x) x0 = std::min(x0, v), x1 = std::max(x1, v);
    for (double v : s.y) y0 = std::min(y0, v), y1 = std::max(y1, v);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  detail::widen(x0, x1);
  detail::widen(y0, y1);
  const double ypad = 0.05 * (y1 - y0), xpad = 0.02 * (x1 - x0);
  detail::Frame f{x0 - xpad, x1 + xpad, y0 - ypad, y1 + ypad};
  f.width = p.width;
  f.height = p.height;

  std::ostringstream os;
  os << detail::header(p.width, p.height);
  detail::axes(os, f, p.title, p.xlabel, p.ylabel);
  for (std::size_t i = 0; i < p.series.size(); ++i) {
    const auto& s = p.series[i];
    const std::string color = s.color.empty() ? detail::palette(i) : s.color;
    if (s.line && s.x.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" stroke-opacity=\""
         << detail::num(s.opacity) << "\" points=\"";
      for (std::size_t k = 0; k < s.x.size(); ++k) os << detail::num(f.px(s.x[k])) << ',' << detail::num(f.py(s.y[k])) << ' ';
      os << "\"/>\n";
    }
    if (s.markers || s.x.size() == 1) {
      os << "<g fill=\"" << color << "\" fill-opacity=\"" << detail::num(s.opacity) << "\">\n";
      for (std::size_t k = 0; k < s.x.size(); ++k)
        os << "<circle cx=\"" << detail::num(f.px(s.x[k])) << "\" cy=\"" << detail::num(f.py(s.y[k])) << "\" r=\"2.5\"/>\n";
      os << "</g>\n";
    }
  }
  // legend
  double ly = f.top + 14;
  for (std::size_t i = 0; i < p.series.size(); ++i) {
    if (p.series[i].label.empty()) continue;
    const std::string color = p.series[i].color.empty() ? detail::palette(i) : p.series[i].color;
    const double lx = p.width - f.right - 170;
    os << "<rect x=\"" << detail::num(lx) << "\" y=\"" << detail::num(ly - 9) << "\" width=\"12\" height=\"10\" fill=\""
       << color << "\"/>\n<text x=\"" << detail::num(lx + 18) << "\" y=\"" << detail::num(ly) << "\">"
       << detail::escape(p.series[i].label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

inline std::string render(const Heatmap& h) {
  if (h.x.empty() || h.y.empty() || h.z.size() != h.y.size()) throw ContractError("svg: heatmap shape mismatch");
  for (const auto& row : h.z)
    if (row.size() != h.x.size()) throw ContractError("svg: heatmap shape mismatch");
  auto edges = [](const std::vector<double>& c) {
    std::vector<double> e(c.size() + 1);
    if (c.size() == 1) {
      e[0] = c[0] - 0.5;
      e[1] = c[0] + 0.5;
      return e;
    }
    for (std::size_t i = 1; i < c.size(); ++i) e[i] = 0.5 * (c[i - 1] + c[i]);
    e[0] = c[0] - (e[1] - c[0]);
    e[c.size()] = c.back() + (c.back() - e[c.size() - 1]);
    return e;
  };
  const auto ex = edges(h.x), ey = edges(h.y);
  double zmax = 0.0;
  for (const auto& row : h.z)
    for (double v : row) zmax = std::max(zmax, v);
  detail::Frame f{ex.front(), ex.back(), std::min(ey.front(), ey.back()), std::max(ey.front(), ey.back())};
  f.width = h.width;
  f.height = h.height;

  std::ostringstream os;
  os << detail::header(h.width, h.height);
  os << "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t r = 0; r < h.y.size(); ++r) {
    const double ya = f.py(ey[r]), yb = f.py(ey[r + 1]);
    for (std::size_t c = 0; c < h.x.size(); ++c) {
      const double t = zmax > 0.0 ? h.z[r][c] / zmax : 0.0;
      // dark blue -> yellow
      const int red = static_cast<int>(std::lround(255 * std::clamp(1.6 * t - 0.3, 0.0, 1.0)));
      const int green = static_cast<int>(std::lround(255 * std::clamp(t, 0.0, 1.0)));
      const int blue = static_cast<int>(std::lround(255 * std::clamp(0.5 - 0.7 * t, 0.0, 1.0) + 40 * (1 - t)));
      const double xa = f.px(ex[c]), xb = f.px(ex[c + 1]);
      os << "<rect x=\"" << detail::num(xa) << "\" y=\"" << detail::num(std::min(ya, yb)) << "\" width=\""
         << detail::num(xb - xa + 0.3) << "\" height=\"" << detail::num(std::abs(yb - ya) + 0.3)
         << "\" fill=\"rgb(" << red << ',' << green << ',' << std::min(blue, 255) << ")\"/>\n";
    }
  }
  os << "</g>\n";
  detail::axes(os, f, h.title, h.xlabel, h.ylabel);
  os << "</svg>\n";
  return os.str();
}

inline void write(const std::string& svg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << svg;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace nldd::svg
