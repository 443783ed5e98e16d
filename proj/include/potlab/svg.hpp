#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace potlab {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Static line plot; nonpositive values are skipped on logarithmic axes.
void write_svg_plot(std::ostream& os, const std::vector<PlotSeries>& series, const PlotOptions& opt);

}  // namespace potlab
