#pragma once

#include <string>
#include <vector>

namespace mchain::svg {

enum class Style { line, scatter, bars };

struct Series {
  std::string label;
  std::vector<double> x;  // bars: bin edges (one more than y)
  std::vector<double> y;
  std::vector<double> err;  // optional vertical error bars
  Style style = Style::line;
  std::string color;  // empty = palette
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
  std::vector<Series> series;
};

// Self-contained SVG document.  Non-finite points (and non-positive ones on a
// log axis) are dropped.
std::string render(const Plot& plot);

void write(const Plot& plot, const std::string& path);

}  // namespace mchain::svg
