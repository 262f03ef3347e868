#include "mchain/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mchain/types.hpp"

namespace mchain::svg {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double map(double v, double p0, double p1) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double x = log ? std::log10(v) : v;
    return p0 + (x - a) / (b - a) * (p1 - p0);
  }
  bool ok(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
};

std::vector<double> ticks(const Axis& ax) {
  std::vector<double> t;
  if (ax.log) {
    for (double e = std::floor(std::log10(ax.lo)); e <= std::ceil(std::log10(ax.hi)); e += 1.0) {
      const double v = std::pow(10.0, e);
      if (v >= ax.lo * (1 - 1e-9) && v <= ax.hi * (1 + 1e-9)) t.push_back(v);
    }
    return t;
  }
  const double span = ax.hi - ax.lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  for (double v = std::ceil(ax.lo / step) * step; v <= ax.hi + 1e-9 * span; v += step)
    t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return t;
}

void fit_range(Axis& ax, const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values)
    if (ax.ok(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!std::isfinite(lo)) {
    lo = ax.log ? 0.1 : 0.0;
    hi = 1.0;
  }
  if (hi <= lo) {
    const double pad = ax.log ? lo * 0.5 : (lo == 0.0 ? 1.0 : std::abs(lo) * 0.1);
    lo -= pad;
    hi += pad;
  }
  if (ax.log) {
    lo = std::pow(10.0, std::floor(std::log10(lo)));
    hi = std::pow(10.0, std::ceil(std::log10(hi)));
  } else {
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  ax.lo = lo;
  ax.hi = hi;
}

}  // namespace

std::string render(const Plot& plot) {
  const double W = plot.width, H = plot.height;
  const double left = 70, right = W - 20, top = 36, bottom = H - 50;
  Axis ax{0, 1, plot.log_x}, ay{0, 1, plot.log_y};
  std::vector<double> xs, ys;
  for (const auto& s : plot.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
    for (std::size_t i = 0; i < s.err.size() && i < s.y.size(); ++i) {
      ys.push_back(s.y[i] + s.err[i]);
      ys.push_back(s.y[i] - s.err[i]);
    }
    if (s.style == Style::bars && !plot.log_y) ys.push_back(0.0);
  }
  fit_range(ax, xs);
  fit_range(ay, ys);
  auto px = [&](double v) { return ax.map(v, left, right); };
  auto py = [&](double v) { return ay.map(v, bottom, top); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(plot.title) << "</text>\n";
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left << "\" height=\""
    << bottom - top << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(ax)) {
    const double x = px(t);
    o << "<line x1=\"" << x << "\" y1=\"" << bottom << "\" x2=\"" << x << "\" y2=\"" << bottom + 5
      << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << bottom + 18
      << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = py(t);
    o << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\"" << y
      << "\" stroke=\"black\"/><text x=\"" << left - 8 << "\" y=\"" << y + 4
      << "\" text-anchor=\"end\">" << num(t) << "</text>\n";
  }
  o << "<text x=\"" << (left + right) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << escape(plot.xlabel) << "</text>\n";
  o << "<text transform=\"translate(16," << (top + bottom) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(plot.ylabel) << "</text>\n";

  o << "<g clip-path=\"url(#plotarea)\">\n";
  o << "<clipPath id=\"plotarea\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\""
    << right - left << "\" height=\"" << bottom - top << "\"/></clipPath>\n";
  std::size_t idx = 0;
  for (const auto& s : plot.series) {
    const std::string color = s.color.empty() ? kPalette[idx % std::size(kPalette)] : s.color;
    ++idx;
    if (s.style == Style::bars) {
      const double base = plot.log_y ? ay.lo : 0.0;
      for (std::size_t i = 0; i + 1 < s.x.size() && i < s.y.size(); ++i) {
        if (!ax.ok(s.x[i]) || !ax.ok(s.x[i + 1]) || !ay.ok(s.y[i])) continue;
        const double x0 = px(s.x[i]), x1 = px(s.x[i + 1]);
        const double y0 = py(s.y[i]), y1 = py(base);
        o << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << std::max(0.5, x1 - x0)
          << "\" height=\"" << std::max(0.0, y1 - y0) << "\" fill=\"" << color
          << "\" fill-opacity=\"0.6\" stroke=\"" << color << "\"/>\n";
      }
      continue;
    }
    if (s.style == Style::line) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (ax.ok(s.x[i]) && ay.ok(s.y[i])) o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      o << "\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (ax.ok(s.x[i]) && ay.ok(s.y[i]))
          o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\""
            << color << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.err.size() && i < s.y.size(); ++i) {
      const double lo = s.y[i] - s.err[i], hi = s.y[i] + s.err[i];
      if (!ax.ok(s.x[i]) || !ay.ok(lo) || !ay.ok(hi)) continue;
      o << "<line x1=\"" << px(s.x[i]) << "\" y1=\"" << py(lo) << "\" x2=\"" << px(s.x[i])
        << "\" y2=\"" << py(hi) << "\" stroke=\"" << color << "\" stroke-opacity=\"0.5\"/>\n";
    }
  }
  o << "</g>\n";
  // Legend
  double ly = top + 14;
  idx = 0;
  for (const auto& s : plot.series) {
    const std::string color = s.color.empty() ? kPalette[idx % std::size(kPalette)] : s.color;
    ++idx;
    if (s.label.empty()) continue;
    o << "<rect x=\"" << right - 150 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"10\" fill=\""
      << color << "\"/><text x=\"" << right - 132 << "\" y=\"" << ly << "\">" << escape(s.label)
      << "</text>\n";
    ly += 16;
  }
  o << "</svg>\n";
  return o.str();
}

void write(const Plot& plot, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("svg: cannot write " + path);
  out << render(plot);
}

}  // namespace mchain::svg
