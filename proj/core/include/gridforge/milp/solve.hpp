#ifndef GRIDFORGE_MILP_SOLVE_HPP
#define GRIDFORGE_MILP_SOLVE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridforge/milp/model.hpp"

namespace gridforge::milp {

enum class SolveStatus { Optimal, Infeasible, Unbounded, TimeLimit };

std::string to_string(SolveStatus s);

struct SolveParams {
  double time_limit_seconds = 1e18;
  double mip_gap = 1e-6;  // absolute optimality gap
  double feasibility_tolerance = 1e-7;
  double integrality_tolerance = 1e-6;
  int64_t node_limit = std::numeric_limits<int64_t>::max();
  // Known upper bound on the optimum (minimization): nodes at or above it are
  // pruned. With a cutoff, Infeasible means "no solution strictly below it".
  std::optional<double> cutoff;
  bool record_trace = false;
};

struct NodeTraceEntry {
  int64_t node = 0;
  int depth = 0;
  double lp_objective = 0.0;
  double global_bound = 0.0;
  double incumbent = 0.0;  // +inf before the first feasible point
};

struct MipSolution {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> assignment;  // per model variable; empty when none found
  double objective_value = 0.0;
  double bound = 0.0;  // best proven dual bound (model sense)
  int64_t node_count = 0;
  std::vector<NodeTraceEntry> trace;

  bool has_solution() const { return !assignment.empty(); }
};

// Solves the continuous relaxation (binaries become [0,1] ranges) with a
// bounded-variable primal simplex. Numerical trouble surfaces as TimeLimit
// status, never as a silently wrong answer.
MipSolution solve_lp(const MipModel& model);

// Branch-and-bound over the binary variables: most-fractional branching with
// ties to the smallest index, best-bound node order with depth-first
// plunging. Deterministic for identical model and params.
MipSolution solve_mip(const MipModel& model, const SolveParams& params = {});

}  // namespace gridforge::milp

#endif
