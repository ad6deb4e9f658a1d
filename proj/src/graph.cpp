#include "forumnet/graph.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "forumnet/error.hpp"

namespace forumnet {

namespace {

std::string pair_text(NodeId u, NodeId v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

// Shared validation for simple graphs; returns pairs normalized to u < v.
std::vector<NodePair> normalized_pairs(std::size_t node_count,
                                       std::span<const NodePair> edge_list) {
  std::vector<NodePair> pairs;
  pairs.reserve(edge_list.size());
  for (auto [u, v] : edge_list) {
    if (u >= node_count || v >= node_count)
      throw ValidationError("edge " + pair_text(u, v) + " has an endpoint outside [0, " +
                            std::to_string(node_count) + ")");
    if (u == v) throw ValidationError("edge " + pair_text(u, v) + " is a self-loop");
    pairs.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(pairs.begin(), pairs.end());
  auto dup = std::adjacent_find(pairs.begin(), pairs.end());
  if (dup != pairs.end())
    throw ValidationError("edge " + pair_text(dup->first, dup->second) + " is a duplicate");
  return pairs;
}

double density_of(std::size_t n, std::size_t m) {
  if (n < 2) return 0.0;
  return static_cast<double>(m) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

}  // namespace

bool Graph::adjacent(NodeId u, NodeId v) const {
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

Graph build_graph(std::size_t node_count, std::span<const NodePair> edge_list) {
  Graph g;
  g.edges_ = normalized_pairs(node_count, edge_list);
  g.offsets_.assign(node_count + 1, 0);
  for (auto [u, v] : g.edges_) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.targets_.resize(2 * g.edges_.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges are sorted by (u, v), so both directions land in ascending order.
  for (auto [u, v] : g.edges_) g.targets_[cursor[u]++] = v;
  for (auto [u, v] : g.edges_) g.targets_[cursor[v]++] = u;
  for (std::size_t v = 0; v < node_count; ++v)
    std::sort(g.targets_.begin() + g.offsets_[v], g.targets_.begin() + g.offsets_[v + 1]);
  return g;
}

WeightedGraph::WeightedGraph(std::size_t node_count, std::vector<WeightedEdge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  std::vector<NodePair> pairs;
  pairs.reserve(edges_.size());
  for (auto& e : edges_) {
    if (!(e.weight > 0.0))
      throw ValidationError("edge " + pair_text(e.u, e.v) + " has non-positive weight");
    if (e.u > e.v) std::swap(e.u, e.v);
    pairs.emplace_back(e.u, e.v);
  }
  normalized_pairs(node_count_, pairs);
  std::sort(edges_.begin(), edges_.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
}

std::vector<double> WeightedGraph::weighted_degrees() const {
  std::vector<double> out(node_count_, 0.0);
  for (const auto& e : edges_) {
    out[e.u] += e.weight;
    out[e.v] += e.weight;
  }
  return out;
}

std::vector<std::size_t> WeightedGraph::degrees() const {
  std::vector<std::size_t> out(node_count_, 0);
  for (const auto& e : edges_) {
    ++out[e.u];
    ++out[e.v];
  }
  return out;
}

std::vector<double> WeightedGraph::max_incident_weights() const {
  std::vector<double> out(node_count_, 0.0);
  for (const auto& e : edges_) {
    out[e.u] = std::max(out[e.u], e.weight);
    out[e.v] = std::max(out[e.v], e.weight);
  }
  return out;
}

BipartiteGraph::BipartiteGraph(std::size_t user_count, std::size_t thread_count,
                               std::vector<Incidence> entries)
    : user_count_(user_count), thread_count_(thread_count), entries_(std::move(entries)) {
  for (const auto& x : entries_) {
    if (x.user >= user_count_ || x.thread >= thread_count_)
      throw ValidationError("incidence (" + std::to_string(x.user) + "," +
                            std::to_string(x.thread) + ") out of bounds");
    if (x.posts == 0)
      throw ValidationError("incidence (" + std::to_string(x.user) + "," +
                            std::to_string(x.thread) + ") has zero posts");
  }
  std::sort(entries_.begin(), entries_.end(), [](const Incidence& a, const Incidence& b) {
    return std::tie(a.thread, a.user) < std::tie(b.thread, b.user);
  });
  auto dup = std::adjacent_find(entries_.begin(), entries_.end(),
                                [](const Incidence& a, const Incidence& b) {
                                  return a.thread == b.thread && a.user == b.user;
                                });
  if (dup != entries_.end())
    throw ValidationError("incidence (" + std::to_string(dup->user) + "," +
                          std::to_string(dup->thread) + ") listed twice");
}

std::uint32_t BipartiteGraph::posts(NodeId user, NodeId thread) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{thread, user},
                             [](const Incidence& a, const std::pair<NodeId, NodeId>& key) {
                               return std::tie(a.thread, a.user) < std::tie(key.first, key.second);
                             });
  if (it != entries_.end() && it->thread == thread && it->user == user) return it->posts;
  return 0;
}

GraphStats graph_stats(const Graph& g) {
  GraphStats s;
  s.degrees.resize(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) s.degrees[v] = g.degree(v);
  s.isolated = static_cast<std::size_t>(std::count(s.degrees.begin(), s.degrees.end(), 0u));
  s.density = density_of(g.node_count(), g.edge_count());
  return s;
}

GraphStats graph_stats(const WeightedGraph& g) {
  GraphStats s;
  s.degrees = g.degrees();
  s.isolated = static_cast<std::size_t>(std::count(s.degrees.begin(), s.degrees.end(), 0u));
  s.density = density_of(g.node_count(), g.edge_count());
  s.weighted_degrees = g.weighted_degrees();
  return s;
}

CanonicalForm canonical_form(unsigned k, std::uint16_t adjacency) {
  if (k > 4) throw ValidationError("canonical form is limited to 4 nodes");
  std::array<std::uint8_t, 4> order{0, 1, 2, 3};  // order[pos] = original node
  const unsigned pairs = k * (k - 1) / 2;
  CanonicalForm best;
  best.id.node_count = static_cast<std::uint8_t>(k);
  best.id.bits = 0xFF;
  best.permutation.resize(k);
  do {
    unsigned code = 0;
    unsigned idx = 0;
    for (unsigned a = 0; a < k; ++a)
      for (unsigned b = a + 1; b < k; ++b, ++idx)
        if (adjacency >> (order[a] * 4 + order[b]) & 1u) code |= 1u << (pairs - 1 - idx);
    if (code < best.id.bits) {
      best.id.bits = static_cast<std::uint8_t>(code);
      for (unsigned pos = 0; pos < k; ++pos) best.permutation[order[pos]] = static_cast<std::uint8_t>(pos);
    }
  } while (std::next_permutation(order.begin(), order.begin() + k));
  return best;
}

CanonicalId canonical_small(const Graph& g) {
  if (g.node_count() > 4)
    throw ValidationError("canonical_small supports at most 4 nodes, got " +
                          std::to_string(g.node_count()));
  std::uint16_t adjacency = 0;
  for (auto [u, v] : g.edges()) {
    adjacency |= static_cast<std::uint16_t>(1u << (u * 4 + v));
    adjacency |= static_cast<std::uint16_t>(1u << (v * 4 + u));
  }
  return canonical_form(static_cast<unsigned>(g.node_count()), adjacency).id;
}

EdgeList read_edge_list(std::istream& in) {
  EdgeList out;
  std::string line;
  std::size_t line_no = 0;
  bool any_weight = false, any_unweighted = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long u = 0, v = 0;
    if (!(fields >> u)) continue;
    if (!(fields >> v) || u < 0 || v < 0)
      throw ValidationError("edge list line " + std::to_string(line_no) + ": expected `u v [w]`");
    double w = 0.0;
    if (fields >> w) {
      any_weight = true;
      out.weights.push_back(w);
    } else {
      any_unweighted = true;
    }
    out.pairs.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    out.node_count = std::max<std::size_t>(out.node_count, static_cast<std::size_t>(std::max(u, v)) + 1);
  }
  if (any_weight && any_unweighted)
    throw ValidationError("edge list mixes weighted and unweighted lines");
  return out;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  auto old = out.precision(17);
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << ' ' << e.weight << '\n';
  out.precision(old);
}

}  // namespace forumnet
