#include "magnav/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace magnav {

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
};

std::string fmt(double v, const char* spec = "%.2f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Largest {1,2,5}*10^k step not exceeding the raw spacing request.
double nice_step(double span, int target_ticks) {
  double raw = span / std::max(target_ticks, 2);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {5.0, 2.0, 1.0}) {
    if (m * mag <= raw) return m * mag;
  }
  return mag;
}

std::string tick_label(double v) {
  if (v != 0.0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-3)) {
    return fmt(v, "%.0e");
  }
  std::string s = fmt(v, "%.6g");
  return s;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

void write_svg_plot(const std::string& path,
                    const std::vector<PlotSeries>& series,
                    const PlotOptions& options) {
  const double margin_l = 78, margin_r = 24, margin_t = 40, margin_b = 56;
  const double w = options.width, h = options.height;
  const double plot_w = w - margin_l - margin_r;
  const double plot_h = h - margin_t - margin_b;

  auto usable_y = [&](double y) {
    return std::isfinite(y) && (!options.log_y || y > 0.0);
  };

  Range rx, ry;
  for (const auto& s : series) {
    size_t n = std::min(s.x.size(), s.y.size());
    for (size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !usable_y(s.y[i])) continue;
      rx.add(s.x[i]);
      ry.add(options.log_y ? std::log10(s.y[i]) : s.y[i]);
    }
  }
  if (!rx.valid() || !ry.valid()) {
    throw std::runtime_error("write_svg_plot: no plottable data for " + path);
  }
  if (rx.hi == rx.lo) {
    rx.lo -= 0.5;
    rx.hi += 0.5;
  }
  if (ry.hi == ry.lo) {
    ry.lo -= 0.5;
    ry.hi += 0.5;
  }
  // 4% headroom so curves do not touch the frame.
  double pad_y = 0.04 * (ry.hi - ry.lo);
  ry.lo -= pad_y;
  ry.hi += pad_y;

  auto sx = [&](double x) {
    return margin_l + (x - rx.lo) / (rx.hi - rx.lo) * plot_w;
  };
  auto sy = [&](double y) {
    double v = options.log_y ? std::log10(y) : y;
    return margin_t + (ry.hi - v) / (ry.hi - ry.lo) * plot_h;
  };

  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_svg_plot: cannot open " + path);

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
     << "\" height=\"" << options.height << "\" viewBox=\"0 0 "
     << options.width << " " << options.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g font-family=\"Helvetica,Arial,sans-serif\" font-size=\"13\">\n";

  // Grid and ticks.
  std::vector<double> xticks, yticks;
  {
    double step = nice_step(rx.hi - rx.lo, 7);
    for (double v = std::ceil(rx.lo / step) * step; v <= rx.hi + 1e-9 * step;
         v += step) {
      xticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
  }
  if (options.log_y) {
    for (int e = static_cast<int>(std::ceil(ry.lo));
         e <= static_cast<int>(std::floor(ry.hi)); ++e) {
      yticks.push_back(static_cast<double>(e));
    }
    if (yticks.empty()) yticks = {0.5 * (ry.lo + ry.hi)};
  } else {
    double step = nice_step(ry.hi - ry.lo, 6);
    for (double v = std::ceil(ry.lo / step) * step; v <= ry.hi + 1e-9 * step;
         v += step) {
      yticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
  }

  for (double v : xticks) {
    double X = sx(v);
    os << "<line x1=\"" << fmt(X) << "\" y1=\"" << fmt(margin_t) << "\" x2=\""
       << fmt(X) << "\" y2=\"" << fmt(margin_t + plot_h)
       << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(X) << "\" y=\"" << fmt(margin_t + plot_h + 18)
       << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
  }
  for (double v : yticks) {
    double val = options.log_y ? std::pow(10.0, v) : v;
    double Y = margin_t + (ry.hi - v) / (ry.hi - ry.lo) * plot_h;
    os << "<line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(Y) << "\" x2=\""
       << fmt(margin_l + plot_w) << "\" y2=\"" << fmt(Y)
       << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(margin_l - 8) << "\" y=\"" << fmt(Y + 4)
       << "\" text-anchor=\"end\">"
       << (options.log_y ? tick_label(val) : tick_label(v)) << "</text>\n";
  }

  // Frame.
  os << "<rect x=\"" << fmt(margin_l) << "\" y=\"" << fmt(margin_t)
     << "\" width=\"" << fmt(plot_w) << "\" height=\"" << fmt(plot_h)
     << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  // Series polylines; gaps at filtered points restart the path.
  for (const auto& s : series) {
    std::string d;
    bool pen_down = false;
    size_t n = std::min(s.x.size(), s.y.size());
    for (size_t i = 0; i < n; ++i) {
      if (!std::isfinite(s.x[i]) || !usable_y(s.y[i])) {
        pen_down = false;
        continue;
      }
      d += pen_down ? " L " : " M ";
      d += fmt(sx(s.x[i])) + " " + fmt(sy(s.y[i]));
      pen_down = true;
    }
    if (d.empty()) continue;
    os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << s.color
       << "\" stroke-width=\"1.6\"/>\n";
  }

  // Legend, top-left inside the frame.
  {
    double lx = margin_l + 12, ly = margin_t + 18;
    for (const auto& s : series) {
      if (s.label.empty()) continue;
      os << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
         << fmt(lx + 26) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\""
         << s.color << "\" stroke-width=\"2.5\"/>\n";
      os << "<text x=\"" << fmt(lx + 32) << "\" y=\"" << fmt(ly) << "\">"
         << xml_escape(s.label) << "</text>\n";
      ly += 18;
    }
  }

  if (!options.title.empty()) {
    os << "<text x=\"" << fmt(margin_l + plot_w / 2) << "\" y=\"24\" "
       << "text-anchor=\"middle\" font-size=\"16\">"
       << xml_escape(options.title) << "</text>\n";
  }
  if (!options.x_label.empty()) {
    os << "<text x=\"" << fmt(margin_l + plot_w / 2) << "\" y=\""
       << fmt(h - 14) << "\" text-anchor=\"middle\">"
       << xml_escape(options.x_label) << "</text>\n";
  }
  if (!options.y_label.empty()) {
    os << "<text x=\"20\" y=\"" << fmt(margin_t + plot_h / 2)
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
       << fmt(margin_t + plot_h / 2) << ")\">" << xml_escape(options.y_label)
       << "</text>\n";
  }

  os << "</g>\n</svg>\n";
  if (!os) throw std::runtime_error("write_svg_plot: write failed for " + path);
}

}  // namespace magnav
