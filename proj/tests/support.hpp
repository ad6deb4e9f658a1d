#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "forumnet/graph.hpp"

namespace forumnet::fixtures {

inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<NodePair> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({u, v});
  return build_graph(n, edges);
}

inline BipartiteGraph random_bipartite(std::size_t users, std::size_t threads, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<std::uint32_t> count(1, 4);
  std::vector<Incidence> entries;
  for (NodeId u = 0; u < users; ++u)
    for (NodeId t = 0; t < threads; ++t)
      if (coin(rng)) entries.push_back({u, t, count(rng)});
  return BipartiteGraph(users, threads, std::move(entries));
}

inline WeightedGraph random_weighted_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::uniform_real_distribution<double> weight(0.01, 5.0);
  std::vector<WeightedEdge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({u, v, weight(rng)});
  return WeightedGraph(n, std::move(edges));
}

inline std::vector<NodeId> random_permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<NodeId> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

inline Graph permute(const Graph& g, const std::vector<NodeId>& p) {
  std::vector<NodePair> edges;
  for (auto [u, v] : g.edges()) edges.push_back({p[u], p[v]});
  return build_graph(g.node_count(), edges);
}

/// Every regular file under `root`, keyed by relative path.
inline std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    out[std::filesystem::relative(entry.path(), root).string()] = buf.str();
  }
  return out;
}

inline std::filesystem::path fresh_directory(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / (name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace forumnet::fixtures
