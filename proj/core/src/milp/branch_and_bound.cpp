#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "gridforge/milp/simplex.hpp"
#include "gridforge/milp/solve.hpp"

namespace gridforge::milp {

namespace {
constexpr double kInf = kInfinity;

double snap_binaries(const MipModel& model, std::vector<double>& assignment) {
  for (int j = 0; j < model.num_variables(); ++j)
    if (model.variable(j).type == VarType::Binary)
      assignment[size_t(j)] = assignment[size_t(j)] >= 0.5 ? 1.0 : 0.0;
  return model.objective_value(assignment);
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

MipSolution solve_lp(const MipModel& model) {
  MipSolution out;
  SimplexSolver solver(model);
  LpResult res = solver.solve();
  switch (res.status) {
    case LpStatus::Optimal: {
      out.assignment = solver.solution();
      out.objective_value = solver.objective();
      out.bound = out.objective_value;
      out.node_count = 0;
      // A wrong answer must never escape: verify the claimed optimum against
      // the original data.
      if (model.max_constraint_violation(out.assignment) > 1e-5) {
        out = MipSolution{};
        out.status = SolveStatus::TimeLimit;
        return out;
      }
      out.status = SolveStatus::Optimal;
      return out;
    }
    case LpStatus::Infeasible: out.status = SolveStatus::Infeasible; return out;
    case LpStatus::Unbounded: out.status = SolveStatus::Unbounded; return out;
    case LpStatus::IterationLimit: out.status = SolveStatus::TimeLimit; return out;
  }
  return out;
}

MipSolution solve_mip(const MipModel& model, const SolveParams& params) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const bool maximize = model.objective_sense() == Sense::Maximize;
  const double gap = std::max(params.mip_gap, 1e-12);

  auto internal = [&](double model_value) { return maximize ? -model_value : model_value; };
  auto external = [&](double internal_value) { return maximize ? -internal_value : internal_value; };

  MipSolution out;

  SimplexSolver lp(model);
  lp.feasibility_tolerance = params.feasibility_tolerance;

  struct Node {
    int64_t id = 0;
    int depth = 0;
    double est = -kInf;    // parent LP value: a valid bound on the subtree
    int64_t bucket = std::numeric_limits<int64_t>::min();  // est quantized at gap resolution
    std::vector<std::pair<int, double>> fixes;
  };
  // Best-bound at gap resolution; ties (the common case near a flat bound) go
  // depth-first so aborted dives resume at the nearest open sibling.
  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bucket != b.bucket) return a.bucket > b.bucket;  // smaller bound first
      if (a.depth != b.depth) return a.depth < b.depth;      // deeper first (plunge)
      return a.id > b.id;                                    // then older first
    }
  };
  const double bucket_width = std::max(gap, 1e-9);
  auto bucket_of = [&](double est) {
    double scaled = est / bucket_width;
    if (scaled <= -9e18) return std::numeric_limits<int64_t>::min();
    if (scaled >= 9e18) return std::numeric_limits<int64_t>::max();
    return int64_t(std::floor(scaled));
  };
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;

  double incumbent_v = params.cutoff ? internal(*params.cutoff) : kInf;
  std::vector<double> best_assignment;
  double best_value_model = 0.0;
  int64_t next_id = 0;
  int64_t nodes_solved = 0;
  bool limited = false;
  bool numerical_failure = false;

  open.push(Node{next_id++, 0, -kInf, {}});

  std::vector<std::pair<int, double>> applied;
  auto apply_fixes = [&](const std::vector<std::pair<int, double>>& fixes) {
    for (const auto& [var, v] : applied) {
      (void)v;
      lp.set_bounds(var, model.variable(var).lower, model.variable(var).upper);
    }
    for (const auto& [var, v] : fixes) lp.set_bounds(var, v, v);
    applied = fixes;
  };

  double final_bound_v = kInf;  // min over open bounds at stop, else incumbent

  // Diving heuristic: from the current LP point, repeatedly fix the most
  // fractional binary to its rounded value; an infeasible step is retried
  // once with the flipped value. Produces early incumbents that the weak
  // relaxations of this model class badly need. Restores bounds afterwards.
  auto dive_for_incumbent = [&]() {
    std::vector<std::pair<int, double>> heuristic_fixes;
    std::vector<char> already_fixed(size_t(model.num_variables()), 0);
    for (const auto& [var, value] : applied) {
      (void)value;
      already_fixed[size_t(var)] = 1;
    }
    int steps_left = std::min(2 * model.num_variables() + 16, 400);
    while (steps_left-- > 0) {
      LpResult res = lp.solve();
      if (res.status != LpStatus::Optimal) break;
      double v = internal(lp.objective());
      if (v >= incumbent_v - gap) break;
      const std::vector<double>& x = lp.solution();
      int pick = -1;
      int pick_priority = std::numeric_limits<int>::min();
      double pick_dist = params.integrality_tolerance;
      for (int j = 0; j < model.num_variables(); ++j) {
        if (model.variable(j).type != VarType::Binary || already_fixed[size_t(j)]) continue;
        double dist = std::abs(x[size_t(j)] - std::round(x[size_t(j)]));
        if (dist <= params.integrality_tolerance) continue;
        int priority = model.branching_priority(j);
        if (priority > pick_priority || (priority == pick_priority && dist > pick_dist)) {
          pick_priority = priority;
          pick_dist = dist;
          pick = j;
        }
      }
      if (pick < 0) {
        std::vector<double> assignment = x;
        double model_value = snap_binaries(model, assignment);
        double snapped_v = internal(model_value);
        if (snapped_v < incumbent_v) {
          incumbent_v = snapped_v;
          best_assignment = assignment;
          best_value_model = model_value;
        }
        break;
      }
      double rounded = std::round(x[size_t(pick)]);
      lp.set_bounds(pick, rounded, rounded);
      LpResult step = lp.solve();
      if (step.status != LpStatus::Optimal || internal(lp.objective()) >= incumbent_v - gap) {
        double flipped = 1.0 - rounded;
        lp.set_bounds(pick, flipped, flipped);
        LpResult retry = lp.solve();
        if (retry.status != LpStatus::Optimal) {
          lp.set_bounds(pick, model.variable(pick).lower, model.variable(pick).upper);
          break;
        }
        heuristic_fixes.emplace_back(pick, flipped);
      } else {
        heuristic_fixes.emplace_back(pick, rounded);
      }
      already_fixed[size_t(pick)] = 1;
    }
    for (const auto& [var, value] : heuristic_fixes) {
      (void)value;
      lp.set_bounds(var, model.variable(var).lower, model.variable(var).upper);
    }
    for (const auto& [var, value] : applied) lp.set_bounds(var, value, value);
  };

  // Depth-first plunging on top of best-bound: after a branch the preferred
  // child is processed immediately; the sibling goes to the heap.
  std::optional<Node> plunge;
  int64_t next_dive = 0;

  while (plunge || !open.empty()) {
    if (nodes_solved >= params.node_limit ||
        std::chrono::duration<double>(Clock::now() - start).count() > params.time_limit_seconds) {
      limited = true;
      final_bound_v = incumbent_v;
      if (plunge) final_bound_v = std::min(final_bound_v, plunge->est);
      if (!open.empty()) final_bound_v = std::min(final_bound_v, open.top().est);
      break;
    }

    Node node;
    if (plunge) {
      node = std::move(*plunge);
      plunge.reset();
      if (node.est >= incumbent_v - gap) continue;  // dive pruned, fall back to the heap
    } else {
      node = open.top();
      open.pop();
      if (node.est >= incumbent_v - gap) {
        // Best-bound order: every remaining node is at least as bad.
        final_bound_v = std::min(node.est, incumbent_v);
        break;
      }
    }

    apply_fixes(node.fixes);
    LpResult res = lp.solve();
    if (res.status == LpStatus::IterationLimit) {
      lp.invalidate_basis();
      res = lp.solve();
    }
    ++nodes_solved;

    if (res.status == LpStatus::IterationLimit) {
      numerical_failure = true;
      final_bound_v = std::min(node.est, incumbent_v);
      break;
    }
    if (res.status == LpStatus::Infeasible) continue;
    if (res.status == LpStatus::Unbounded) {
      out.status = SolveStatus::Unbounded;
      out.node_count = nodes_solved;
      return out;
    }

    double v = internal(res.objective);

    if (params.record_trace) {
      NodeTraceEntry entry;
      entry.node = nodes_solved;
      entry.depth = node.depth;
      entry.lp_objective = external(v);
      entry.global_bound = external(std::min(node.est, std::min(v, incumbent_v)));
      entry.incumbent = incumbent_v == kInf ? kInf : external(incumbent_v);
      out.trace.push_back(entry);
    }

    if (v >= incumbent_v - gap) continue;

    // Branch on the most fractional binary within the highest branching
    // class that has any fractional variable.
    const std::vector<double>& x = lp.solution();
    int frac_var = -1;
    int frac_priority = std::numeric_limits<int>::min();
    double frac_dist = params.integrality_tolerance;
    for (int j = 0; j < model.num_variables(); ++j) {
      if (model.variable(j).type != VarType::Binary) continue;
      double value = x[size_t(j)];
      double dist = std::abs(value - std::round(value));
      if (dist <= params.integrality_tolerance) continue;
      int priority = model.branching_priority(j);
      if (priority > frac_priority || (priority == frac_priority && dist > frac_dist)) {
        frac_priority = priority;
        frac_dist = dist;
        frac_var = j;
      }
    }

    if (frac_var < 0) {
      std::vector<double> assignment = x;
      double model_value = snap_binaries(model, assignment);
      double snapped_v = internal(model_value);
      if (snapped_v < incumbent_v) {
        incumbent_v = snapped_v;
        best_assignment = std::move(assignment);
        best_value_model = model_value;
      }
      continue;
    }

    double frac_value = x[size_t(frac_var)];
    if (nodes_solved >= next_dive) {
      dive_for_incumbent();
      // Dive often while still hunting a first incumbent, sparingly after.
      next_dive = nodes_solved + (best_assignment.empty() ? 100 : 1500);
      if (v >= incumbent_v - gap) continue;  // the dive may have closed this node
    }
    int preferred = frac_value >= 0.5 ? 1 : 0;
    Node down;
    down.id = next_id++;
    down.depth = node.depth + 1;
    down.est = v;
    down.bucket = bucket_of(v);
    down.fixes = node.fixes;
    down.fixes.emplace_back(frac_var, double(preferred));
    Node other;
    other.id = next_id++;
    other.depth = node.depth + 1;
    other.est = v;
    other.bucket = down.bucket;
    other.fixes = std::move(node.fixes);
    other.fixes.emplace_back(frac_var, double(1 - preferred));
    plunge = std::move(down);
    open.push(std::move(other));
  }

  out.node_count = nodes_solved;
  if (numerical_failure || limited) {
    out.status = SolveStatus::TimeLimit;
    if (!best_assignment.empty()) {
      out.assignment = std::move(best_assignment);
      out.objective_value = best_value_model;
    }
    out.bound = external(std::min(final_bound_v, incumbent_v));
    return out;
  }

  if (best_assignment.empty()) {
    out.status = SolveStatus::Infeasible;
    return out;
  }
  out.status = SolveStatus::Optimal;
  out.assignment = std::move(best_assignment);
  out.objective_value = best_value_model;
  out.bound = out.objective_value;
  return out;
}

}  // namespace gridforge::milp
