#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace forumnet {

using NodeId = std::uint32_t;
using NodePair = std::pair<NodeId, NodeId>;

/// Simple undirected graph over dense node indices [0, node_count).
/// Immutable after construction; neighbor lists are sorted ascending.
class Graph {
 public:
  Graph() = default;

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Edges as (u, v) with u < v, sorted lexicographically.
  std::span<const NodePair> edges() const { return edges_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  bool adjacent(NodeId u, NodeId v) const;

  /// Position of neighbor list of v inside the flat adjacency array; slot
  /// indices in [offset(v), offset(v+1)) identify directed half-edges.
  std::size_t offset(NodeId v) const { return offsets_[v]; }

 private:
  friend Graph build_graph(std::size_t, std::span<const NodePair>);
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  std::vector<NodePair> edges_;
};

/// Rejects out-of-range endpoints, self-loops and duplicate edges, naming the
/// offending pair in the ValidationError message.
Graph build_graph(std::size_t node_count, std::span<const NodePair> edge_list);

struct WeightedEdge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 0.0;
};

/// Undirected graph with strictly positive edge weights.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  /// Validates the same simple-graph rules as build_graph plus weight > 0.
  WeightedGraph(std::size_t node_count, std::vector<WeightedEdge> edges);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  /// Normalized so that u < v, sorted by (u, v).
  std::span<const WeightedEdge> edges() const { return edges_; }

  std::vector<double> weighted_degrees() const;
  std::vector<std::size_t> degrees() const;
  /// Largest incident weight per node; 0 for nodes without edges.
  std::vector<double> max_incident_weights() const;

 private:
  std::size_t node_count_ = 0;
  std::vector<WeightedEdge> edges_;
};

struct Incidence {
  NodeId user = 0;
  NodeId thread = 0;
  std::uint32_t posts = 0;
};

/// User-thread incidence with post counts x_it >= 1; absent pairs mean zero.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(std::size_t user_count, std::size_t thread_count,
                 std::vector<Incidence> entries);

  std::size_t user_count() const { return user_count_; }
  std::size_t thread_count() const { return thread_count_; }
  /// Sorted by (thread, user).
  std::span<const Incidence> entries() const { return entries_; }
  /// x_it, 0 when absent.
  std::uint32_t posts(NodeId user, NodeId thread) const;

  /// External identifiers, index-aligned with the dense ids. Optional.
  std::vector<std::string> user_labels;
  std::vector<std::string> thread_labels;

 private:
  std::size_t user_count_ = 0;
  std::size_t thread_count_ = 0;
  std::vector<Incidence> entries_;
};

struct GraphStats {
  std::vector<std::size_t> degrees;
  double density = 0.0;
  std::size_t isolated = 0;
  std::optional<std::vector<double>> weighted_degrees;
};

GraphStats graph_stats(const Graph& g);
GraphStats graph_stats(const WeightedGraph& g);

/// Isomorphism class identifier for graphs on at most four nodes: the minimal
/// upper-triangle adjacency bit string over all node permutations.
struct CanonicalId {
  std::uint8_t node_count = 0;
  std::uint8_t bits = 0;
  auto operator<=>(const CanonicalId&) const = default;
};

/// Canonical id plus one permutation achieving it: permutation[i] is the
/// canonical position of original node i.
struct CanonicalForm {
  CanonicalId id;
  std::vector<std::uint8_t> permutation;
};

CanonicalId canonical_small(const Graph& g);

/// Works on a raw adjacency bitmask: bit (i * 4 + j) set when i ~ j, for
/// k <= 4 nodes. Used on the hot path of the subgraph-enumeration oracle.
CanonicalForm canonical_form(unsigned k, std::uint16_t adjacency);

/// `u v [w]` per line, `#` comments, 0-based indices. node_count is one more
/// than the largest index seen.
struct EdgeList {
  std::size_t node_count = 0;
  std::vector<NodePair> pairs;
  std::vector<double> weights;  // empty when unweighted
};

EdgeList read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);
void write_edge_list(std::ostream& out, const WeightedGraph& g);

}  // namespace forumnet
