#include "otoclab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace otoclab::io {

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "log-linear") return PlotKind::LogLinear;
  if (s == "log-log") return PlotKind::LogLog;
  if (s == "scatter") return PlotKind::Scatter;
  throw std::invalid_argument("plot kind must be log-linear, log-log or scatter (got '" + s +
                              "')");
}

std::string to_string(PlotKind k) {
  switch (k) {
    case PlotKind::LogLinear: return "log-linear";
    case PlotKind::LogLog: return "log-log";
    default: return "scatter";
  }
}

namespace {

constexpr double kW = 760, kH = 520;
constexpr double kL = 72, kR = 24, kT = 40, kB = 56;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '&') o += "&amp;";
    else if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else o += c;
  }
  return o;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

struct Axis {
  bool log = false;
  double lo = 0, hi = 1;           // transformed range
  double t(double v) const { return log ? std::log10(v) : v; }
  bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

// ticks at 1/2/5 x 10^k covering [lo, hi] with about n steps
std::vector<double> nice_ticks(double lo, double hi, int n) {
  const double span = hi - lo;
  if (!(span > 0)) return {lo};
  const double raw = span / n;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return ticks;
}

std::string log_label(double e) {
  // label for a tick at 10^e
  if (std::abs(e - std::round(e)) < 1e-9) {
    char b[24];
    std::snprintf(b, sizeof b, "1e%d", static_cast<int>(std::round(e)));
    return b;
  }
  return fmt(std::pow(10.0, e));
}

}  // namespace

void write_plot(const std::string& path, const PlotSpec& spec,
                const std::vector<Series>& series) {
  Axis ax, ay;
  ax.log = spec.kind == PlotKind::LogLog;
  ay.log = spec.kind != PlotKind::Scatter;

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  std::size_t drawable = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size())
      throw std::runtime_error("plot series '" + s.name + "': x and y lengths differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!ax.valid(s.x[i]) || !ay.valid(s.y[i])) continue;
      ++drawable;
      xlo = std::min(xlo, ax.t(s.x[i]));
      xhi = std::max(xhi, ax.t(s.x[i]));
      ylo = std::min(ylo, ay.t(s.y[i]));
      yhi = std::max(yhi, ay.t(s.y[i]));
    }
  }
  if (drawable == 0)
    throw std::runtime_error("nothing to plot: no finite points valid on " +
                             to_string(spec.kind) + " axes");
  auto pad = [](double& lo, double& hi) {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double p = 0.04 * (hi - lo);
      lo -= p;
      hi += p;
    }
  };
  pad(xlo, xhi);
  pad(ylo, yhi);
  ax.lo = xlo;
  ax.hi = xhi;
  ay.lo = ylo;
  ay.hi = yhi;

  auto X = [&](double v) { return kL + (ax.t(v) - ax.lo) / (ax.hi - ax.lo) * (kW - kL - kR); };
  auto Y = [&](double v) { return kH - kB - (ay.t(v) - ay.lo) / (ay.hi - ay.lo) * (kH - kT - kB); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"15\">" << esc(spec.title) << "</text>\n";

  // frame
  svg << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\""
      << kH - kT - kB << "\" fill=\"none\" stroke=\"#333\"/>\n";

  auto axis_ticks = [&](const Axis& a) {
    std::vector<double> tk = nice_ticks(a.lo, a.hi, 6);
    if (a.log) {
      // prefer whole decades when at least two fit
      std::vector<double> dec;
      for (double e = std::ceil(a.lo); e <= std::floor(a.hi) + 1e-9; e += 1.0)
        dec.push_back(e);
      if (dec.size() >= 2 && dec.size() <= 14) return dec;
    }
    return tk;
  };

  for (double tx : axis_ticks(ax)) {
    const double px = kL + (tx - ax.lo) / (ax.hi - ax.lo) * (kW - kL - kR);
    svg << "<line x1=\"" << px << "\" y1=\"" << kT << "\" x2=\"" << px << "\" y2=\"" << kH - kB
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<line x1=\"" << px << "\" y1=\"" << kH - kB << "\" x2=\"" << px << "\" y2=\""
        << kH - kB + 5 << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << kH - kB + 19
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << (ax.log ? log_label(tx) : fmt(tx)) << "</text>\n";
  }
  for (double ty : axis_ticks(ay)) {
    const double py = kH - kB - (ty - ay.lo) / (ay.hi - ay.lo) * (kH - kT - kB);
    svg << "<line x1=\"" << kL << "\" y1=\"" << py << "\" x2=\"" << kW - kR << "\" y2=\"" << py
        << "\" stroke=\"#ddd\"/>\n";
    svg << "<line x1=\"" << kL - 5 << "\" y1=\"" << py << "\" x2=\"" << kL << "\" y2=\"" << py
        << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << kL - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << (ay.log ? log_label(ty) : fmt(ty)) << "</text>\n";
  }
  svg << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << esc(spec.xlabel) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (kT + kH - kB) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
      << " transform=\"rotate(-90 18 " << (kT + kH - kB) / 2 << ")\">" << esc(spec.ylabel)
      << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
    if (s.line) {
      bool open = false;
      std::ostringstream pts;
      auto flush = [&]() {
        if (open)
          svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\""
              << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts.str()
              << "\"/>\n";
        pts.str("");
        open = false;
      };
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!ax.valid(s.x[i]) || !ay.valid(s.y[i])) {
          flush();
          continue;
        }
        pts << fmt(X(s.x[i])) << ',' << fmt(Y(s.y[i])) << ' ';
        open = true;
      }
      flush();
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!ax.valid(s.x[i]) || !ay.valid(s.y[i])) continue;
        svg << "<circle cx=\"" << fmt(X(s.x[i])) << "\" cy=\"" << fmt(Y(s.y[i]))
            << "\" r=\"2.2\" fill=\"" << color << "\" fill-opacity=\"0.75\"/>\n";
      }
    }
    // legend entry
    const double ly = kT + 16 + 16 * static_cast<double>(si);
    svg << "<line x1=\"" << kW - kR - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kW - kR - 126
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    svg << "<text x=\"" << kW - kR - 120 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << esc(s.name) << "</text>\n";
  }
  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << svg.str();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace otoclab::io
