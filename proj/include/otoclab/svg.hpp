#pragma once
// Standalone SVG plots: enough to eyeball growth laws without a plotting
// stack. Log axes drop nonpositive/non-finite points; a dropped interior
// point breaks the polyline rather than bridging it.

#include <string>
#include <vector>

namespace otoclab::io {

enum class PlotKind { LogLinear, LogLog, Scatter };
PlotKind plot_kind_from_string(const std::string& s);  // throws std::invalid_argument
std::string to_string(PlotKind k);

struct Series {
  std::string name;
  std::vector<double> x, y;
  bool line = true;     // polyline; false = markers only
  bool dashed = false;  // fitted/theory overlay style
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  PlotKind kind = PlotKind::LogLinear;
};

// throws std::runtime_error if nothing is drawable (empty series, or every
// point invalid on the requested axes) - no file is emitted in that case
void write_plot(const std::string& path, const PlotSpec& spec,
                const std::vector<Series>& series);

}  // namespace otoclab::io
