#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "forumnet/netemd.hpp"

namespace forumnet {

struct ChangeFlag {
  std::string from;
  std::string to;
  std::size_t from_index = 0;
  std::size_t to_index = 0;
  int jump = 1;
  double distance = 0.0;
  double median = 0.0;
  /// A k > 1 flag whose span contains a flagged consecutive pair; reports
  /// show the consecutive flag instead.
  bool shadowed = false;
};

/// Median of the strict upper triangle (mean of the two central values when
/// the count is even).
double upper_triangle_median(const DistanceMatrix& d);

/// Flags d[i, i+k] > median for every k in `jumps`. Consecutive flags come
/// first, then larger jumps, each in window order.
std::vector<ChangeFlag> flag_changes(const DistanceMatrix& d, const std::set<int>& jumps = {1, 2});

/// JSON array of flag objects.
void write_flags_json(std::ostream& out, const std::vector<ChangeFlag>& flags);

}  // namespace forumnet
