#include "forumnet/orbits.hpp"

#include <algorithm>
#include <map>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "forumnet/error.hpp"
#include "forumnet/parallel.hpp"

namespace forumnet {

namespace {

void check_max_size(int max_size) {
  if (max_size < 2 || max_size > 4)
    throw ValidationError("graphlet size must be 2, 3 or 4, got " + std::to_string(max_size));
}

std::int64_t choose2(std::int64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }
std::int64_t choose3(std::int64_t n) { return n < 3 ? 0 : n * (n - 1) * (n - 2) / 6; }

// Half-edge triangle counts: tri[slot] = |N(v) ∩ N(x)| for slot (v -> x).
std::vector<std::int64_t> edge_triangles(const Graph& g, unsigned workers) {
  std::vector<std::int64_t> tri(2 * g.edge_count(), 0);
  const std::size_t n = g.node_count();
  parallel_for(n, workers, [&](std::size_t vi) {
    auto v = static_cast<NodeId>(vi);
    auto nv = g.neighbors(v);
    for (std::size_t s = 0; s < nv.size(); ++s) {
      auto nx = g.neighbors(nv[s]);
      std::int64_t common = 0;
      for (std::size_t i = 0, j = 0; i < nv.size() && j < nx.size();) {
        if (nv[i] < nx[j]) ++i;
        else if (nv[i] > nx[j]) ++j;
        else { ++common; ++i; ++j; }
      }
      tri[g.offset(v) + s] = common;
    }
  });
  return tri;
}

struct Scratch {
  std::vector<std::int64_t> common;  // two-hop common-neighbour counters
  std::vector<NodeId> touched;
};

// Per-node K4 counts. Each clique is found once from its lowest-ranked node
// along edges oriented by (degree, id).
std::vector<std::int64_t> k4_counts(const Graph& g, unsigned workers) {
  const std::size_t n = g.node_count();
  auto before = [&](NodeId a, NodeId b) {
    return g.degree(a) < g.degree(b) || (g.degree(a) == g.degree(b) && a < b);
  };
  std::vector<std::vector<NodeId>> out(n);
  for (NodeId v = 0; v < n; ++v)
    for (NodeId w : g.neighbors(v))
      if (before(v, w)) out[v].push_back(w);

  const unsigned stripes = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::vector<std::vector<std::int64_t>> partial(stripes);
  parallel_for(stripes, stripes, [&](std::size_t stripe) {
    auto& count = partial[stripe];
    count.assign(n, 0);
    std::vector<std::uint32_t> mark_u(n, 0), mark_uv(n, 0);
    std::uint32_t stamp_u = 0, stamp_uv = 0;
    std::vector<NodeId> common;
    for (std::size_t ui = stripe; ui < n; ui += stripes) {
      ++stamp_u;
      for (NodeId w : out[ui]) mark_u[w] = stamp_u;
      for (NodeId v : out[ui]) {
        ++stamp_uv;
        common.clear();
        for (NodeId w : out[v])
          if (mark_u[w] == stamp_u) {
            mark_uv[w] = stamp_uv;
            common.push_back(w);
          }
        for (NodeId w : common)
          for (NodeId z : out[w])
            if (mark_uv[z] == stamp_uv) {
              ++count[ui];
              ++count[v];
              ++count[w];
              ++count[z];
            }
      }
    }
  });
  std::vector<std::int64_t> total(n, 0);
  for (const auto& p : partial)
    for (std::size_t v = 0; v < n; ++v) total[v] += p[v];
  return total;
}

// Converts non-induced counts (graphlet copies that need not be induced) into
// induced orbit counts. The coefficient of orbit b in the row of orbit a is
// the number of copies of a's graphlet, with v at orbit a, that are spanning
// subgraphs of b's graphlet with v at orbit b.
void solve_induced(std::array<std::int64_t, kOrbitCount>& c) {
  c[13] -= 3 * c[14];
  c[12] -= 3 * c[14];
  c[11] -= 2 * c[13] + 3 * c[14];
  c[10] -= 2 * c[12] + 2 * c[13] + 6 * c[14];
  c[9] -= 2 * c[12] + 3 * c[14];
  c[8] -= c[12] + c[13] + 3 * c[14];
  c[7] -= c[11] + c[13] + c[14];
  c[6] -= c[9] + c[10] + 2 * c[12] + c[13] + 3 * c[14];
  c[5] -= 2 * c[8] + c[10] + 2 * c[11] + 2 * c[12] + 4 * c[13] + 6 * c[14];
  c[4] -= 2 * c[8] + 2 * c[9] + c[10] + 4 * c[12] + 2 * c[13] + 6 * c[14];
}

}  // namespace

std::vector<int> orbits_up_to(int max_size) {
  check_max_size(max_size);
  int last = max_size == 2 ? 0 : max_size == 3 ? 3 : 14;
  std::vector<int> ids(static_cast<std::size_t>(last + 1));
  for (int o = 0; o <= last; ++o) ids[static_cast<std::size_t>(o)] = o;
  return ids;
}

OrbitMatrix::OrbitMatrix(std::size_t node_count, std::vector<int> orbit_ids)
    : node_count_(node_count), orbit_ids_(std::move(orbit_ids)) {
  column_of_.fill(-1);
  for (std::size_t c = 0; c < orbit_ids_.size(); ++c) {
    int o = orbit_ids_[c];
    if (o < 0 || o >= kOrbitCount) throw ValidationError("orbit id " + std::to_string(o) + " out of range");
    if (column_of_[o] >= 0) throw ValidationError("orbit id " + std::to_string(o) + " repeated");
    column_of_[o] = static_cast<int>(c);
  }
  counts_.assign(node_count_ * orbit_ids_.size(), 0);
}

std::size_t OrbitMatrix::column(int orbit) const {
  if (orbit < 0 || orbit >= kOrbitCount || column_of_[orbit] < 0)
    throw ValidationError("orbit " + std::to_string(orbit) + " not present in orbit matrix");
  return static_cast<std::size_t>(column_of_[orbit]);
}

std::vector<double> OrbitMatrix::orbit_values(int orbit) const {
  std::size_t c = column(orbit);
  std::vector<double> out(node_count_);
  for (std::size_t v = 0; v < node_count_; ++v)
    out[v] = static_cast<double>(counts_[v * orbit_ids_.size() + c]);
  return out;
}

OrbitMatrix count_orbits(const Graph& g, int max_size, unsigned workers) {
  auto ids = orbits_up_to(max_size);
  const std::size_t n = g.node_count();
  OrbitMatrix out(n, ids);
  if (workers == 0) workers = default_workers();

  std::vector<std::int64_t> deg(n);
  for (NodeId v = 0; v < n; ++v) deg[v] = static_cast<std::int64_t>(g.degree(v));
  if (max_size == 2) {
    for (NodeId v = 0; v < n; ++v) out.at(v, 0) = deg[v];
    return out;
  }

  const auto tri = edge_triangles(g, workers);
  std::vector<std::int64_t> triangles(n, 0);   // T(v)
  std::vector<std::int64_t> path_ends(n, 0);   // Σ_{b~v} (deg b - 1)
  for (NodeId v = 0; v < n; ++v) {
    auto nv = g.neighbors(v);
    for (std::size_t s = 0; s < nv.size(); ++s) {
      triangles[v] += tri[g.offset(v) + s];
      path_ends[v] += deg[nv[s]] - 1;
    }
    triangles[v] /= 2;
  }

  if (max_size == 3) {
    for (NodeId v = 0; v < n; ++v) {
      out.at(v, 0) = deg[v];
      out.at(v, 1) = path_ends[v] - 2 * triangles[v];
      out.at(v, 2) = choose2(deg[v]) - triangles[v];
      out.at(v, 3) = triangles[v];
    }
    return out;
  }

  const auto k4 = k4_counts(g, workers);
  const unsigned stripes = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  parallel_for(stripes, stripes, [&](std::size_t stripe) {
    Scratch scratch;
    scratch.common.assign(n, 0);
    for (std::size_t vi = stripe; vi < n; vi += stripes) {
      const auto v = static_cast<NodeId>(vi);
      const auto nv = g.neighbors(v);
      const std::int64_t dv = deg[v];
      const std::int64_t tv = triangles[v];
      std::array<std::int64_t, kOrbitCount> c{};

      // Two-hop common-neighbour counts for 4-cycles through v.
      for (NodeId a : nv)
        for (NodeId w : g.neighbors(a)) {
          if (w == v) continue;
          if (scratch.common[w]++ == 0) scratch.touched.push_back(w);
        }
      for (NodeId w : scratch.touched) {
        c[8] += choose2(scratch.common[w]);
        scratch.common[w] = 0;
      }
      scratch.touched.clear();

      for (std::size_t s = 0; s < nv.size(); ++s) {
        const NodeId x = nv[s];
        const std::int64_t dx = deg[x];
        const std::int64_t t_vx = tri[g.offset(v) + s];
        c[4] += path_ends[x] - (dv - 1);
        c[5] += (dv - 1) * (dx - 1);
        c[6] += choose2(dx - 1);
        c[9] += triangles[x] - t_vx;
        c[10] += t_vx * (dx - 2);
        c[13] += choose2(t_vx);

        // Triangles (v, x, y) with y > x.
        const auto nx = g.neighbors(x);
        for (std::size_t i = 0, j = 0; i < nv.size() && j < nx.size();) {
          if (nv[i] < nx[j]) ++i;
          else if (nv[i] > nx[j]) ++j;
          else {
            if (nv[i] > x) c[12] += tri[g.offset(x) + j] - 1;
            ++i;
            ++j;
          }
        }
      }
      c[14] = k4[v];
      c[4] -= 2 * tv;
      c[5] -= 2 * tv;
      c[7] = choose3(dv);
      c[11] = tv * (dv - 2);
      solve_induced(c);

      c[0] = dv;
      c[1] = path_ends[v] - 2 * tv;
      c[2] = choose2(dv) - tv;
      c[3] = tv;
      for (int o = 0; o < kOrbitCount; ++o) out.at(v, o) = c[static_cast<std::size_t>(o)];
    }
  });
  return out;
}

namespace {

struct GraphletShape {
  std::vector<NodePair> edges;
  std::vector<int> orbit_of_node;
};

// orbit_by_position[id] gives, for each canonical position, the orbit.
std::map<CanonicalId, std::vector<int>> build_orbit_table() {
  const std::vector<GraphletShape> shapes = {
      {{{0, 1}}, {0, 0}},
      {{{0, 1}, {1, 2}}, {1, 2, 1}},
      {{{0, 1}, {1, 2}, {0, 2}}, {3, 3, 3}},
      {{{0, 1}, {1, 2}, {2, 3}}, {4, 5, 5, 4}},
      {{{0, 1}, {0, 2}, {0, 3}}, {7, 6, 6, 6}},
      {{{0, 1}, {1, 2}, {2, 3}, {3, 0}}, {8, 8, 8, 8}},
      {{{0, 1}, {0, 2}, {1, 2}, {0, 3}}, {11, 10, 10, 9}},
      {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}, {13, 13, 12, 12}},
      {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, {14, 14, 14, 14}},
  };
  std::map<CanonicalId, std::vector<int>> table;
  for (const auto& shape : shapes) {
    std::uint16_t adjacency = 0;
    for (auto [u, v] : shape.edges) adjacency |= static_cast<std::uint16_t>((1u << (u * 4 + v)) | (1u << (v * 4 + u)));
    auto k = static_cast<unsigned>(shape.orbit_of_node.size());
    auto form = canonical_form(k, adjacency);
    std::vector<int> by_position(k);
    for (unsigned node = 0; node < k; ++node) by_position[form.permutation[node]] = shape.orbit_of_node[node];
    table.emplace(form.id, std::move(by_position));
  }
  return table;
}

}  // namespace

OrbitMatrix count_orbits_bruteforce(const Graph& g, int max_size) {
  auto ids = orbits_up_to(max_size);
  const std::size_t n = g.node_count();
  OrbitMatrix out(n, ids);
  static const auto table = build_orbit_table();

  std::vector<NodeId> subset;
  auto classify = [&] {
    const auto k = static_cast<unsigned>(subset.size());
    std::uint16_t adjacency = 0;
    for (unsigned a = 0; a < k; ++a)
      for (unsigned b = a + 1; b < k; ++b)
        if (g.adjacent(subset[a], subset[b]))
          adjacency |= static_cast<std::uint16_t>((1u << (a * 4 + b)) | (1u << (b * 4 + a)));
    auto form = canonical_form(k, adjacency);
    const auto& orbit_at = table.at(form.id);
    for (unsigned a = 0; a < k; ++a) ++out.at(subset[a], orbit_at[form.permutation[a]]);
  };

  // Connected-subset expansion (ESU): each connected set is produced exactly
  // once, rooted at its smallest node, extended by exclusive neighbours.
  auto in_subset_or_adjacent = [&](NodeId w) {
    for (NodeId s : subset)
      if (s == w || g.adjacent(s, w)) return true;
    return false;
  };
  auto extend = [&](auto&& self, std::vector<NodeId> extension, NodeId root) -> void {
    if (subset.size() >= 2) classify();
    if (static_cast<int>(subset.size()) == max_size) return;
    while (!extension.empty()) {
      NodeId w = extension.back();
      extension.pop_back();
      std::vector<NodeId> next = extension;
      for (NodeId u : g.neighbors(w)) {
        if (u <= root || in_subset_or_adjacent(u)) continue;
        if (std::find(next.begin(), next.end(), u) == next.end()) next.push_back(u);
      }
      subset.push_back(w);
      self(self, std::move(next), root);
      subset.pop_back();
    }
  };
  for (NodeId v = 0; v < n; ++v) {
    subset.assign(1, v);
    std::vector<NodeId> extension;
    for (NodeId u : g.neighbors(v))
      if (u > v) extension.push_back(u);
    extend(extend, std::move(extension), v);
  }
  return out;
}

OrbitMatrix relabel_orbits(const OrbitMatrix& m, std::span<const int> mapping) {
  std::vector<int> ids(m.orbit_ids().begin(), m.orbit_ids().end());
  std::vector<int> renamed;
  for (int o : ids) {
    if (static_cast<std::size_t>(o) >= mapping.size())
      throw ValidationError("orbit relabeling map does not cover orbit " + std::to_string(o));
    renamed.push_back(mapping[static_cast<std::size_t>(o)]);
  }
  auto sorted = renamed;
  std::sort(sorted.begin(), sorted.end());
  auto original = ids;
  std::sort(original.begin(), original.end());
  if (sorted != original) throw ValidationError("orbit relabeling map is not a permutation of the orbit ids");
  OrbitMatrix out(m.node_count(), renamed);
  for (std::size_t v = 0; v < m.node_count(); ++v)
    for (std::size_t c = 0; c < ids.size(); ++c) out.at(v, renamed[c]) = m.at(v, ids[c]);
  return out;
}

void write_orbit_csv(std::ostream& out, const OrbitMatrix& m) {
  out << "node";
  for (int o : m.orbit_ids()) out << ",o" << o;
  out << '\n';
  for (std::size_t v = 0; v < m.node_count(); ++v) {
    out << v;
    for (auto c : m.row(v)) out << ',' << c;
    out << '\n';
  }
}

OrbitMatrix read_orbit_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("orbit CSV is empty");
  std::vector<int> ids;
  {
    std::istringstream header(line);
    std::string cell;
    std::getline(header, cell, ',');
    if (cell != "node") throw ValidationError("orbit CSV header must start with 'node'");
    while (std::getline(header, cell, ',')) {
      if (cell.size() < 2 || cell[0] != 'o') throw ValidationError("bad orbit column '" + cell + "'");
      try {
        ids.push_back(std::stoi(cell.substr(1)));
      } catch (const std::exception&) {
        throw ValidationError("bad orbit column '" + cell + "'");
      }
    }
  }
  std::vector<std::vector<std::int64_t>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    if (cell != std::to_string(rows.size()))
      throw ValidationError("line " + std::to_string(line_no) + ": nodes must be numbered 0..n-1 in order");
    std::vector<std::int64_t> values;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stoll(cell, &used));
        if (used != cell.size() || values.back() < 0) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(line_no) + ": bad count '" + cell + "'");
      }
    }
    if (values.size() != ids.size())
      throw ValidationError("line " + std::to_string(line_no) + ": expected " + std::to_string(ids.size()) + " counts");
    rows.push_back(std::move(values));
  }
  OrbitMatrix m(rows.size(), ids);
  for (std::size_t v = 0; v < rows.size(); ++v)
    for (std::size_t c = 0; c < ids.size(); ++c) m.at(v, ids[c]) = rows[v][c];
  return m;
}

}  // namespace forumnet
