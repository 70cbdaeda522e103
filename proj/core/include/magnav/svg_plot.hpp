// Minimal static SVG line-chart writer for the comparison figures: labeled
// axes, optional log y scale, legend. Output is deterministic.
#pragma once

#include <string>
#include <vector>

namespace magnav {

struct PlotSeries {
  std::string label;
  std::string color = "#d62728";  ///< any SVG color string
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  int width = 960;
  int height = 540;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  ///< log10 scale; nonpositive samples are dropped
};

/// Renders the series to `path`. Throws std::runtime_error when the file
/// cannot be written or when no finite data point survives filtering.
void write_svg_plot(const std::string& path,
                    const std::vector<PlotSeries>& series,
                    const PlotOptions& options);

}  // namespace magnav
