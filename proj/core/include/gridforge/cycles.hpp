#ifndef GRIDFORGE_CYCLES_HPP
#define GRIDFORGE_CYCLES_HPP

#include <cstddef>
#include <vector>

#include "gridforge/network.hpp"

namespace gridforge {

// One edge of the reduced simple graph: a bus pair carrying one or more
// parallel edges of the multigraph.
struct ReducedEdge {
  int u = 0;  // bus index, u < v
  int v = 0;
  std::vector<int> edge_indices;  // parallel multigraph edges, ascending
};

// Simple cycles of the reduced graph plus the parallel-edge groups. Cycles are
// canonicalized (smallest vertex first, lexicographically smaller direction)
// and listed in lexicographic order, so the result is independent of edge
// insertion order.
struct CycleSet {
  std::vector<ReducedEdge> reduced_edges;
  std::vector<std::vector<int>> cycles;  // each entry: reduced-edge indices along the cycle

  // Vertex count of cycle c (equals its length).
  std::size_t cycle_size(std::size_t c) const { return cycles[c].size(); }
};

inline constexpr std::size_t kDefaultMaxCycles = 10000;

// Enumerates all simple cycles (length >= 3) of the reduced simple graph by
// rooted depth-first search. Throws CycleBudgetExceeded when the count passes
// max_cycles; the radiality constraints need the complete set, so truncation
// would be silently wrong.
CycleSet enumerate_cycles(const NetworkInstance& instance,
                          std::size_t max_cycles = kDefaultMaxCycles);

}  // namespace gridforge

#endif
