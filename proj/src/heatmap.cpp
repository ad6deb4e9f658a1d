#include "forumnet/heatmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "forumnet/error.hpp"

namespace forumnet {

namespace {

constexpr std::array<int, 3> kDark = {8, 48, 107};
constexpr std::array<int, 3> kLight = {247, 251, 255};

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

}  // namespace

std::string heatmap_axis_label(const std::string& label) {
  const bool date = label.size() == 10 && label[4] == '-' && label[7] == '-' &&
                    std::all_of(label.begin(), label.end(), [](char c) { return c == '-' || (c >= '0' && c <= '9'); });
  if (!date) return label;
  return label.substr(5, 2) + "-" + label.substr(0, 4);
}

std::string heatmap_color(double value, double min, double max) {
  const double t = max > min ? std::clamp((value - min) / (max - min), 0.0, 1.0) : 0.0;
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(kDark[c] + t * (kLight[c] - kDark[c])));
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string render_heatmap(const DistanceMatrix& d, const HeatmapOptions& options) {
  const std::size_t n = d.size();
  if (n == 0) throw ValidationError("cannot render an empty distance matrix");
  if (options.cell_size < 1 || options.label_every < 1) throw ValidationError("heatmap sizes must be positive");

  double lo = d(0, 0), hi = d(0, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      lo = std::min(lo, d(i, j));
      hi = std::max(hi, d(i, j));
    }

  const int cell = options.cell_size;
  const int margin = 70;
  const int top = options.title.empty() ? margin : margin + 20;
  const int side = cell * static_cast<int>(n);
  const int width = margin + side + 10;
  const int height = top + side + 10;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  if (!options.title.empty())
    svg << "<text x=\"" << margin << "\" y=\"16\" font-size=\"13\">" << escape(options.title) << "</text>\n";
  svg << "<g id=\"cells\">\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      svg << "<rect x=\"" << margin + cell * static_cast<int>(j) << "\" y=\"" << top + cell * static_cast<int>(i)
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"" << heatmap_color(d(i, j), lo, hi)
          << "\"/>\n";
  svg << "</g>\n<g id=\"labels\">\n";
  const auto labels = d.labels();
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(options.label_every)) {
    const std::string text = escape(heatmap_axis_label(labels[i]));
    const int mid = cell * static_cast<int>(i) + cell / 2;
    svg << "<text x=\"" << margin - 4 << "\" y=\"" << top + mid + 3 << "\" text-anchor=\"end\">" << text
        << "</text>\n";
    svg << "<text transform=\"translate(" << margin + mid + 3 << ',' << top - 4
        << ") rotate(-90)\" text-anchor=\"start\">" << text << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace forumnet
