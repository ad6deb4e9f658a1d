#include "forumnet/projection.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "forumnet/error.hpp"

namespace forumnet {

BipartiteGraph build_bipartite(const WindowSlice& w) {
  std::map<std::string, NodeId> users, threads;
  for (const auto& p : w.posts) {
    users.emplace(p.user_id, 0);
    threads.emplace(p.thread_id, 0);
  }
  NodeId next = 0;
  for (auto& [id, index] : users) index = next++;
  next = 0;
  for (auto& [id, index] : threads) index = next++;

  std::map<std::pair<NodeId, NodeId>, std::uint32_t> counts;
  for (const auto& p : w.posts) ++counts[{threads[p.thread_id], users[p.user_id]}];
  std::vector<Incidence> entries;
  entries.reserve(counts.size());
  for (const auto& [key, n] : counts) entries.push_back({key.second, key.first, n});

  BipartiteGraph b(users.size(), threads.size(), std::move(entries));
  for (const auto& [id, index] : users) b.user_labels.push_back(id);
  for (const auto& [id, index] : threads) b.thread_labels.push_back(id);
  return b;
}

ProjectionMode parse_projection_mode(const std::string& name) {
  if (name == "plain") return ProjectionMode::plain;
  if (name == "weighted") return ProjectionMode::weighted;
  throw ValidationError("unknown projection mode '" + name + "' (expected plain or weighted)");
}

std::string to_string(ProjectionMode mode) { return mode == ProjectionMode::plain ? "plain" : "weighted"; }

WeightedGraph project_users(const BipartiteGraph& b, ProjectionMode mode) {
  const auto entries = b.entries();
  // Per-thread ranges (entries are sorted by thread, then user).
  struct ThreadSpan {
    std::size_t begin, end;
    double scale;
  };
  std::vector<ThreadSpan> spans;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> user_threads(b.user_count());
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t k = i;
    double posts = 0.0;
    while (k < entries.size() && entries[k].thread == entries[i].thread) posts += entries[k++].posts;
    const auto users = static_cast<double>(k - i);
    double scale = 1.0;
    if (mode == ProjectionMode::weighted) scale = users > 1.0 ? 1.0 / ((users - 1.0) * posts) : 0.0;
    for (std::size_t e = i; e < k; ++e) user_threads[entries[e].user].emplace_back(spans.size(), e);
    spans.push_back({i, k, scale});
    i = k;
  }

  std::vector<WeightedEdge> edges;
  std::vector<double> acc(b.user_count(), 0.0);
  std::vector<NodeId> touched;
  for (NodeId u = 0; u < b.user_count(); ++u) {
    for (auto [t, self] : user_threads[u]) {
      const auto& span = spans[t];
      if (span.end - span.begin < 2) continue;
      const double xu = entries[self].posts;
      for (std::size_t e = span.begin; e < span.end; ++e) {
        const NodeId v = entries[e].user;
        if (v <= u) continue;
        if (acc[v] == 0.0) touched.push_back(v);
        acc[v] += xu * entries[e].posts * span.scale;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (NodeId v : touched) {
      if (acc[v] > 0.0) edges.push_back({u, v, acc[v]});
      acc[v] = 0.0;
    }
    touched.clear();
  }
  return WeightedGraph(b.user_count(), std::move(edges));
}

ProjectionResult sparsify_threshold(const WeightedGraph& g) {
  if (g.edge_count() == 0) throw ValidationError("cannot sparsify a projection without edges");
  const auto degrees = g.degrees();
  std::vector<NodeId> remap(g.node_count(), std::numeric_limits<NodeId>::max());
  ProjectionResult r;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (degrees[v] > 0) {
      remap[v] = static_cast<NodeId>(r.user_index.size());
      r.user_index.push_back(v);
    }
  std::vector<WeightedEdge> kept;
  for (const auto& e : g.edges()) kept.push_back({remap[e.u], remap[e.v], e.weight});
  r.weighted = WeightedGraph(r.user_index.size(), std::move(kept));

  const auto max_incident = r.weighted.max_incident_weights();
  r.threshold = *std::min_element(max_incident.begin(), max_incident.end());
  std::vector<NodePair> strong;
  for (const auto& e : r.weighted.edges())
    if (e.weight >= r.threshold) strong.emplace_back(e.u, e.v);
  r.sparsified = build_graph(r.user_index.size(), strong);
  return r;
}

ProjectionSummary summarize(const std::string& label, const ProjectionResult& r) {
  ProjectionSummary s;
  s.label = label;
  s.nodes = r.sparsified.node_count();
  s.edges = r.sparsified.edge_count();
  s.avg_degree = s.nodes == 0 ? 0.0 : 2.0 * static_cast<double>(s.edges) / static_cast<double>(s.nodes);
  s.threshold = r.threshold;
  return s;
}

void write_projection_summary(std::ostream& out, const std::vector<ProjectionSummary>& rows) {
  std::ostringstream buf;
  buf << std::setprecision(12);
  buf << "label,nodes,edges,avg_degree,threshold\n";
  for (const auto& s : rows)
    buf << s.label << ',' << s.nodes << ',' << s.edges << ',' << s.avg_degree << ',' << s.threshold << '\n';
  out << buf.str();
}

}  // namespace forumnet
