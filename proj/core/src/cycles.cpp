#include "gridforge/cycles.hpp"

#include <algorithm>
#include <map>

#include "gridforge/errors.hpp"

namespace gridforge {

namespace {

// Canonical form of a vertex cycle: rotate so the smallest vertex leads, then
// pick the direction whose second vertex is smaller.
std::vector<int> canonicalize(const std::vector<int>& cycle) {
  std::size_t n = cycle.size();
  std::size_t at = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (cycle[i] < cycle[at]) at = i;
  std::vector<int> fwd(n), rev(n);
  for (std::size_t i = 0; i < n; ++i) {
    fwd[i] = cycle[(at + i) % n];
    rev[i] = cycle[(at + n - i) % n];
  }
  return std::min(fwd, rev);
}

}  // namespace

CycleSet enumerate_cycles(const NetworkInstance& instance, std::size_t max_cycles) {
  CycleSet result;
  InstanceIndex index = make_index(instance);

  // Reduce the multigraph: one entry per unordered bus pair.
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (int e = 0; e < int(instance.edges.size()); ++e) {
    int u = index.bus.at(instance.edges[size_t(e)].from);
    int v = index.bus.at(instance.edges[size_t(e)].to);
    if (u > v) std::swap(u, v);
    groups[{u, v}].push_back(e);
  }
  std::map<std::pair<int, int>, int> reduced_index;
  for (auto& [pair, edges] : groups) {
    std::sort(edges.begin(), edges.end());
    reduced_index[pair] = int(result.reduced_edges.size());
    result.reduced_edges.push_back({pair.first, pair.second, edges});
  }

  int n = int(instance.buses.size());
  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(n));
  for (const ReducedEdge& re : result.reduced_edges) {
    adjacency[size_t(re.u)].push_back(re.v);
    adjacency[size_t(re.v)].push_back(re.u);
  }
  for (auto& a : adjacency) std::sort(a.begin(), a.end());

  // Rooted DFS: each cycle is emitted exactly once with its smallest vertex
  // as root and the smaller neighbor direction, so no duplicates arise.
  std::vector<std::vector<int>> vertex_cycles;
  std::vector<char> on_path(size_t(n), 0);
  std::vector<int> path;

  auto dfs = [&](auto&& self, int root, int v) -> void {
    for (int w : adjacency[size_t(v)]) {
      if (w == root && path.size() >= 3) {
        if (path[1] < path.back()) {
          vertex_cycles.push_back(path);
          if (vertex_cycles.size() > max_cycles)
            throw CycleBudgetExceeded(vertex_cycles.size(), max_cycles);
        }
        continue;
      }
      if (w <= root || on_path[size_t(w)]) continue;
      on_path[size_t(w)] = 1;
      path.push_back(w);
      self(self, root, w);
      path.pop_back();
      on_path[size_t(w)] = 0;
    }
  };

  for (int root = 0; root < n; ++root) {
    on_path[size_t(root)] = 1;
    path.assign(1, root);
    dfs(dfs, root, root);
    on_path[size_t(root)] = 0;
  }

  std::vector<std::vector<int>> canonical;
  canonical.reserve(vertex_cycles.size());
  for (const auto& cyc : vertex_cycles) canonical.push_back(canonicalize(cyc));
  std::sort(canonical.begin(), canonical.end());

  for (const auto& cyc : canonical) {
    std::vector<int> edges;
    edges.reserve(cyc.size());
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      int u = cyc[i];
      int v = cyc[(i + 1) % cyc.size()];
      if (u > v) std::swap(u, v);
      edges.push_back(reduced_index.at({u, v}));
    }
    result.cycles.push_back(std::move(edges));
  }

  return result;
}

}  // namespace gridforge
