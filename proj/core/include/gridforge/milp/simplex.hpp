#ifndef GRIDFORGE_MILP_SIMPLEX_HPP
#define GRIDFORGE_MILP_SIMPLEX_HPP

#include <cstdint>
#include <vector>

#include "gridforge/milp/model.hpp"

namespace gridforge::milp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;  // model sense
  int64_t iterations = 0;
};

// Bounded-variable primal simplex on a dense tableau. Phase 1 absorbs any
// bound violations of the current basis into per-row artificial variables
// (their tableau columns are unit vectors at whatever basis is loaded, so the
// trick works for warm starts too) and minimizes their total excursion; with
// a fixed phase objective, Bland's-rule fallback guarantees termination.
//
// The tableau depends only on the basis, never on the bounds, so callers may
// tighten or relax variable bounds between solves and re-solve from the
// current basis; branch-and-bound leans on this for cheap node solves.
// Single-threaded and deterministic.
class SimplexSolver {
 public:
  explicit SimplexSolver(const MipModel& model);

  // Working bounds of a structural variable (resets are the caller's job).
  void set_bounds(int var, double lower, double upper);
  double lower_bound(int var) const { return lo_[size_t(var)]; }
  double upper_bound(int var) const { return up_[size_t(var)]; }

  LpResult solve();

  // Valid after solve() returns Optimal.
  const std::vector<double>& solution() const { return solution_; }
  double objective() const { return objective_; }

  // Drops the current basis; the next solve cold-starts from the slack basis.
  void invalidate_basis() { tableau_valid_ = false; }

  double feasibility_tolerance = 1e-7;
  // 0 = automatic (scales with the model size).
  int64_t iteration_limit = 0;
  // Wall-clock budget for one solve() call; IterationLimit on expiry.
  double time_limit_seconds = 0.0;  // 0 = unlimited

 private:
  enum class Status : uint8_t { Basic, AtLower, AtUpper, Free };

  void build_tableau();
  void refresh_nonbasic_values();
  void compute_basic_values();
  int install_artificials();  // returns the number of active artificials
  void pivot(int row, int col);
  LpStatus run_phase(const std::vector<double>& costs, int64_t iter_limit, int64_t* iters);

  // Geometry: m_ rows; columns are n_struct_ structural, then m_ slacks, then
  // m_ reserved artificial slots; tab_ is m_ x (n_cols_+1) row-major with the
  // last column holding B^{-1} b.
  const MipModel* model_ = nullptr;
  int m_ = 0;
  int n_struct_ = 0;
  int n_cols_ = 0;
  std::vector<double> tab_;
  std::vector<double> lo_, up_;    // per column
  std::vector<double> cost_;       // phase-2 costs (internal minimization)
  std::vector<double> phase1_cost_;
  std::vector<int> basis_;         // var of each row
  std::vector<Status> status_;     // per column
  std::vector<double> nb_value_;   // value of each nonbasic column
  std::vector<double> xb_;         // basic values per row
  std::vector<double> solution_;   // structural values after solve
  double objective_ = 0.0;
  bool maximize_ = false;
  bool tableau_valid_ = false;

  double& at(int r, int c) { return tab_[size_t(r) * size_t(n_cols_ + 1) + size_t(c)]; }
  double at(int r, int c) const { return tab_[size_t(r) * size_t(n_cols_ + 1) + size_t(c)]; }
};

}  // namespace gridforge::milp

#endif
