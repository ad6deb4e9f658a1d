#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "forumnet/graph.hpp"

namespace forumnet {

/// Orbits of the connected graphlets on 2-4 nodes, in the usual numbering:
///   G0 edge: 0 | G1 path P3: 1 end, 2 middle | G2 triangle: 3
///   G3 path P4: 4 end, 5 middle | G4 star: 6 leaf, 7 center | G5 cycle C4: 8
///   G6 paw: 9 pendant, 10 triangle degree-2, 11 hub
///   G7 diamond: 12 degree-2, 13 degree-3 | G8 K4: 14
inline constexpr int kOrbitCount = 15;

/// Orbit ids available for a given maximum graphlet size (2, 3 or 4).
std::vector<int> orbits_up_to(int max_size);

/// Per-node orbit counts. Row v holds one count per entry of orbit_ids().
class OrbitMatrix {
 public:
  OrbitMatrix() = default;
  OrbitMatrix(std::size_t node_count, std::vector<int> orbit_ids);

  std::size_t node_count() const { return node_count_; }
  std::span<const int> orbit_ids() const { return orbit_ids_; }
  bool has_orbit(int orbit) const { return column_of_[orbit] >= 0; }

  std::int64_t& at(std::size_t node, int orbit) {
    return counts_[node * orbit_ids_.size() + column(orbit)];
  }
  std::int64_t at(std::size_t node, int orbit) const {
    return counts_[node * orbit_ids_.size() + column(orbit)];
  }
  std::span<const std::int64_t> row(std::size_t node) const {
    return {counts_.data() + node * orbit_ids_.size(), orbit_ids_.size()};
  }
  /// Counts of one orbit across all nodes, as reals.
  std::vector<double> orbit_values(int orbit) const;

  bool operator==(const OrbitMatrix& other) const = default;

 private:
  std::size_t column(int orbit) const;

  std::size_t node_count_ = 0;
  std::vector<int> orbit_ids_;
  std::array<int, kOrbitCount> column_of_{};
  std::vector<std::int64_t> counts_;
};

/// Orbit counts by common-neighbour merging and combinatorial identities
/// relating induced and non-induced graphlet counts. Work is split over nodes
/// (`workers` = 0 uses hardware concurrency); output is independent of it.
OrbitMatrix count_orbits(const Graph& g, int max_size, unsigned workers = 0);

/// Reference implementation: enumerates every connected induced subgraph on
/// at most max_size nodes and classifies it by canonical form. Exponential
/// in density; meant for small graphs and as a test oracle.
OrbitMatrix count_orbits_bruteforce(const Graph& g, int max_size);

/// Renames orbit columns: the column for orbit o becomes mapping[o].
/// mapping must be a permutation of the matrix's orbit ids.
OrbitMatrix relabel_orbits(const OrbitMatrix& m, std::span<const int> mapping);

/// CSV with header `node,o<id>,...`.
void write_orbit_csv(std::ostream& out, const OrbitMatrix& m);
OrbitMatrix read_orbit_csv(std::istream& in);

}  // namespace forumnet
