#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "forumnet/forum.hpp"
#include "forumnet/graph.hpp"

namespace forumnet {

/// User-thread post counts of one window. Users and threads are indexed in
/// ascending order of their external ids, which are kept as labels.
BipartiteGraph build_bipartite(const WindowSlice& w);

enum class ProjectionMode {
  plain,     // a_ij = sum_t x_it x_jt
  weighted,  // a_ij = sum_t x_it x_jt / ((υ_t - 1) φ_t)
};

ProjectionMode parse_projection_mode(const std::string& name);
std::string to_string(ProjectionMode mode);

/// One-mode projection onto users. Node i of the result is user i of b.
/// Threads with a single user contribute nothing.
WeightedGraph project_users(const BipartiteGraph& b, ProjectionMode mode);

struct ProjectionResult {
  WeightedGraph weighted;        // restricted to users with at least one edge
  double threshold = 0.0;        // min over nodes of the max incident weight
  Graph sparsified;              // edges with weight >= threshold
  std::vector<NodeId> user_index;  // node of `weighted` -> node of the input graph
};

/// Keeps the edges at or above the largest threshold that leaves no node
/// isolated. Nodes without edges are dropped first.
ProjectionResult sparsify_threshold(const WeightedGraph& g);

struct ProjectionSummary {
  std::string label;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double avg_degree = 0.0;
  double threshold = 0.0;
};

ProjectionSummary summarize(const std::string& label, const ProjectionResult& r);
/// `label,nodes,edges,avg_degree,threshold`
void write_projection_summary(std::ostream& out, const std::vector<ProjectionSummary>& rows);

}  // namespace forumnet
