#ifndef GRIDFORGE_TESTS_SUPPORT_ORACLES_HPP
#define GRIDFORGE_TESTS_SUPPORT_ORACLES_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gridforge/formulation.hpp"
#include "gridforge/milp/model.hpp"
#include "gridforge/network.hpp"

// Independent verification oracles. Nothing here may call back into the
// implementation paths it checks.
namespace gridforge::testing {

struct VertexOptimum {
  double objective = 0.0;
  std::vector<double> point;
};

// Brute-force vertex enumeration for LPs with at most 4 variables: solves
// every n-subset of tight rows (constraints and finite bounds) and minimizes
// over the feasible intersections. nullopt when no feasible vertex exists or
// an improving ray makes the problem unbounded.
std::optional<VertexOptimum> enumerate_lp_vertices(const milp::MipModel& model);

// Exhaustive binary enumeration: fixes every 0/1 pattern and checks the
// continuous remainder arithmetically (pure-binary models) or via vertex
// enumeration (at most 4 continuous variables). nullopt when infeasible.
std::optional<double> enumerate_mip(const milp::MipModel& model);

// Count of vertex subsets of the reduced simple graph that induce a cycle;
// independent of the DFS cycle enumerator. Requires <= 16 buses.
std::size_t count_cycles_by_subsets(const NetworkInstance& instance);

// Union-find forest check over the closed-line subgraph (line_used = 1 and
// switch_open = 0), counting parallel edges.
bool closed_lines_form_forest(const NetworkInstance& instance, const ScenarioOperation& op);

// Direction-corrected imbalance band check for every multi-phase edge
// carrying flow.
bool phase_balance_holds(const NetworkInstance& instance, const ScenarioOperation& op,
                         double tolerance);

// Seeded random LP over 2-3 variables and 2-4 rows (for oracle comparison).
milp::MipModel random_lp(uint64_t seed);

// Seeded random mixed model with `binaries` binary and up to 2 continuous
// variables.
milp::MipModel random_mip(uint64_t seed, int binaries, bool with_continuous);

}  // namespace gridforge::testing

#endif
