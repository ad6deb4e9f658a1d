#pragma once

#include <string>

#include "forumnet/netemd.hpp"

namespace forumnet {

struct HeatmapOptions {
  int cell_size = 14;
  int label_every = 1;  // draw every n-th axis label
  std::string title;
};

/// Window labels of the form YYYY-MM-DD are shown as MM-YYYY.
std::string heatmap_axis_label(const std::string& label);

/// Hex colour for a distance; the minimum maps to the dark end of the scale.
std::string heatmap_color(double value, double min, double max);

/// Square grid SVG; the matrix must be non-empty.
std::string render_heatmap(const DistanceMatrix& d, const HeatmapOptions& options = {});

}  // namespace forumnet
