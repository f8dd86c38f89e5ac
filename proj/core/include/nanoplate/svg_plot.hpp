#pragma once

#include <string>
#include <vector>

namespace nanoplate {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool markers = true;
  bool line = true;
};

/// Standalone SVG document with log10 axes. Nonpositive values are skipped.
std::string loglog_svg(const std::vector<PlotSeries>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel);

}  // namespace nanoplate
