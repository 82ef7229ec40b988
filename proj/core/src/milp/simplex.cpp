#include "gridforge/milp/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace gridforge::milp {

namespace {
constexpr double kInf = kInfinity;
constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr double kRatioTieTol = 1e-9;
constexpr int kStallLimit = 500;
}  // namespace

SimplexSolver::SimplexSolver(const MipModel& model) : model_(&model) {
  m_ = model.num_constraints();
  n_struct_ = model.num_variables();
  n_cols_ = n_struct_ + 2 * m_;  // slacks + reserved artificial slots
  maximize_ = model.objective_sense() == Sense::Maximize;

  lo_.assign(size_t(n_cols_), 0.0);
  up_.assign(size_t(n_cols_), 0.0);
  cost_.assign(size_t(n_cols_), 0.0);
  for (int j = 0; j < n_struct_; ++j) {
    const Variable& v = model.variable(j);
    lo_[size_t(j)] = v.lower;
    up_[size_t(j)] = v.upper;
    double c = model.objective_coeff(j);
    cost_[size_t(j)] = maximize_ ? -c : c;
  }
  // Slack s_i turns row i into a*x + s = rhs; its bounds encode the relation.
  for (int i = 0; i < m_; ++i) {
    const Constraint& c = model.constraint(i);
    int j = n_struct_ + i;
    switch (c.relation) {
      case Relation::LessEqual:
        lo_[size_t(j)] = 0.0;
        up_[size_t(j)] = kInf;
        break;
      case Relation::GreaterEqual:
        lo_[size_t(j)] = -kInf;
        up_[size_t(j)] = 0.0;
        break;
      case Relation::Equal:
        lo_[size_t(j)] = 0.0;
        up_[size_t(j)] = 0.0;
        break;
    }
  }
  // Artificial slots start pinned at zero.
  for (int i = 0; i < m_; ++i) {
    int j = n_struct_ + m_ + i;
    lo_[size_t(j)] = up_[size_t(j)] = 0.0;
  }
}

void SimplexSolver::set_bounds(int var, double lower, double upper) {
  lo_[size_t(var)] = lower;
  up_[size_t(var)] = upper;
}

void SimplexSolver::build_tableau() {
  tab_.assign(size_t(m_) * size_t(n_cols_ + 1), 0.0);
  basis_.assign(size_t(m_), 0);
  status_.assign(size_t(n_cols_), Status::AtLower);
  nb_value_.assign(size_t(n_cols_), 0.0);

  for (int i = 0; i < m_; ++i) {
    const Constraint& c = model_->constraint(i);
    for (const LinearTerm& t : c.terms) at(i, t.var) += t.coeff;
    at(i, n_struct_ + i) = 1.0;
    at(i, n_cols_) = c.rhs;
    basis_[size_t(i)] = n_struct_ + i;
    status_[size_t(n_struct_ + i)] = Status::Basic;
  }
  for (int i = 0; i < m_; ++i) {
    int j = n_struct_ + m_ + i;
    lo_[size_t(j)] = up_[size_t(j)] = 0.0;
  }
  tableau_valid_ = true;
}

void SimplexSolver::refresh_nonbasic_values() {
  for (int j = 0; j < n_cols_; ++j) {
    if (status_[size_t(j)] == Status::Basic) continue;
    double lo = lo_[size_t(j)], up = up_[size_t(j)];
    Status s = status_[size_t(j)];
    if (s == Status::AtUpper && !std::isfinite(up)) s = std::isfinite(lo) ? Status::AtLower : Status::Free;
    if (s == Status::AtLower && !std::isfinite(lo)) s = std::isfinite(up) ? Status::AtUpper : Status::Free;
    if (s == Status::Free) {
      // Keep 0 when admissible, otherwise snap to the nearest bound.
      if (std::isfinite(lo) && lo > 0.0) s = Status::AtLower;
      else if (std::isfinite(up) && up < 0.0) s = Status::AtUpper;
    }
    status_[size_t(j)] = s;
    nb_value_[size_t(j)] = s == Status::AtLower ? lo : (s == Status::AtUpper ? up : 0.0);
  }
}

void SimplexSolver::compute_basic_values() {
  xb_.assign(size_t(m_), 0.0);
  for (int i = 0; i < m_; ++i) xb_[size_t(i)] = at(i, n_cols_);
  for (int j = 0; j < n_cols_; ++j) {
    if (status_[size_t(j)] == Status::Basic) continue;
    double v = nb_value_[size_t(j)];
    if (v == 0.0) continue;
    for (int i = 0; i < m_; ++i) {
      double a = at(i, j);
      if (a != 0.0) xb_[size_t(i)] -= a * v;
    }
  }
}

// Pins every artificial slot to zero, then re-opens one artificial per row
// whose basic variable violates its bounds: the displaced variable snaps to
// the violated bound and the artificial absorbs the residual, making the
// basis feasible for the phase-1 problem.
int SimplexSolver::install_artificials() {
  const double ftol = feasibility_tolerance;
  phase1_cost_.assign(size_t(n_cols_), 0.0);
  for (int i = 0; i < m_; ++i) {
    int j = n_struct_ + m_ + i;
    lo_[size_t(j)] = up_[size_t(j)] = 0.0;
    if (status_[size_t(j)] != Status::Basic) nb_value_[size_t(j)] = 0.0;
  }

  // Rows occupied by (possibly stale) basic artificials.
  std::vector<char> slot_basic(size_t(m_), 0);
  for (int i = 0; i < m_; ++i)
    if (basis_[size_t(i)] >= n_struct_ + m_) slot_basic[size_t(basis_[size_t(i)] - n_struct_ - m_)] = 1;

  int installed = 0;
  int next_slot = 0;
  for (int i = 0; i < m_; ++i) {
    int b = basis_[size_t(i)];
    double x = xb_[size_t(i)];
    double lo = lo_[size_t(b)], up = up_[size_t(b)];
    if (x >= lo - ftol && x <= up + ftol) continue;

    int art;
    double residual;
    if (b >= n_struct_ + m_) {
      // The row's basic variable is already an artificial (pinned to [0,0]
      // above); re-open it in place. Its tableau column is e_i by basicness.
      art = b;
      residual = x;
    } else {
      while (next_slot < m_ && slot_basic[size_t(next_slot)]) ++next_slot;
      art = n_struct_ + m_ + next_slot;
      slot_basic[size_t(next_slot)] = 1;
      for (int r = 0; r < m_; ++r) at(r, art) = 0.0;
      at(i, art) = 1.0;
      double bound = x < lo ? lo : up;
      status_[size_t(b)] = x < lo ? Status::AtLower : Status::AtUpper;
      nb_value_[size_t(b)] = bound;
      basis_[size_t(i)] = art;
      status_[size_t(art)] = Status::Basic;
      residual = x - bound;
    }
    if (residual >= 0.0) {
      lo_[size_t(art)] = 0.0;
      up_[size_t(art)] = kInf;
      phase1_cost_[size_t(art)] = 1.0;
    } else {
      lo_[size_t(art)] = -kInf;
      up_[size_t(art)] = 0.0;
      phase1_cost_[size_t(art)] = -1.0;
    }
    ++installed;
  }
  if (installed > 0) compute_basic_values();
  return installed;
}

void SimplexSolver::pivot(int row, int col) {
  double piv = at(row, col);
  double* prow = &tab_[size_t(row) * size_t(n_cols_ + 1)];
  double inv = 1.0 / piv;
  for (int c = 0; c <= n_cols_; ++c) prow[c] *= inv;
  prow[col] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == row) continue;
    double factor = at(i, col);
    if (factor == 0.0) continue;
    double* irow = &tab_[size_t(i) * size_t(n_cols_ + 1)];
    for (int c = 0; c <= n_cols_; ++c) irow[c] -= factor * prow[c];
    irow[col] = 0.0;
  }
}

// Feasibility-preserving bounded simplex with the given (fixed) cost vector:
// Dantzig pricing, Bland's rule after a stall, bound flips, blocking ratio
// test. The caller guarantees the starting point is within bounds.
LpStatus SimplexSolver::run_phase(const std::vector<double>& costs, int64_t iter_limit,
                                  int64_t* iters) {
  bool bland = false;
  int stall = 0;
  double last_merit = kInf;
  std::vector<double> rw(size_t(m_), 0.0);
  std::vector<double> dj(size_t(n_cols_), 0.0);

  while (true) {
    if (++*iters > iter_limit) return LpStatus::IterationLimit;

    double merit = 0.0;
    for (int j = 0; j < n_cols_; ++j)
      if (status_[size_t(j)] != Status::Basic && costs[size_t(j)] != 0.0)
        merit += costs[size_t(j)] * nb_value_[size_t(j)];
    for (int i = 0; i < m_; ++i) merit += costs[size_t(basis_[size_t(i)])] * xb_[size_t(i)];
    if (merit < last_merit - 1e-12) {
      last_merit = merit;
      stall = 0;
    } else if (++stall > kStallLimit) {
      bland = true;
    }

    // Reduced costs d = c - rw^T T with rw the basic costs.
    for (int i = 0; i < m_; ++i) rw[size_t(i)] = costs[size_t(basis_[size_t(i)])];
    for (int j = 0; j < n_cols_; ++j) dj[size_t(j)] = costs[size_t(j)];
    for (int i = 0; i < m_; ++i) {
      double w = rw[size_t(i)];
      if (w == 0.0) continue;
      const double* irow = &tab_[size_t(i) * size_t(n_cols_ + 1)];
      for (int j = 0; j < n_cols_; ++j) dj[size_t(j)] -= w * irow[j];
    }

    // Entering column.
    int q = -1;
    int dir = 0;
    double best_score = kReducedCostTol;
    for (int j = 0; j < n_cols_; ++j) {
      Status s = status_[size_t(j)];
      if (s == Status::Basic) continue;
      if (lo_[size_t(j)] == up_[size_t(j)]) continue;  // fixed, never enters
      double d = dj[size_t(j)];
      int cand_dir = 0;
      if ((s == Status::AtLower || s == Status::Free) && d < -best_score) cand_dir = 1;
      else if ((s == Status::AtUpper || s == Status::Free) && d > best_score) cand_dir = -1;
      if (cand_dir == 0) continue;
      q = j;
      dir = cand_dir;
      if (bland) break;
      best_score = std::abs(d);
    }
    if (q < 0) return LpStatus::Optimal;

    // Ratio test: entering moves by t >= 0 in direction dir; basic i changes
    // at rate -T_iq * dir and blocks at the bound it approaches.
    double self_cap = dir > 0 ? up_[size_t(q)] - nb_value_[size_t(q)]
                              : nb_value_[size_t(q)] - lo_[size_t(q)];
    double block_t = kInf;
    int block_row = -1;
    double block_pivot = 0.0;
    double block_target = 0.0;
    for (int i = 0; i < m_; ++i) {
      double alpha = at(i, q);
      if (std::abs(alpha) <= kPivotTol) continue;
      double rate = -alpha * double(dir);
      int b = basis_[size_t(i)];
      double target = rate > 0.0 ? up_[size_t(b)] : lo_[size_t(b)];
      if (!std::isfinite(target)) continue;
      double t = (target - xb_[size_t(i)]) / rate;
      if (t < 0.0) t = 0.0;
      bool take = false;
      if (block_row < 0 || t < block_t - kRatioTieTol) {
        take = true;
      } else if (t <= block_t + kRatioTieTol) {
        take = bland ? b < basis_[size_t(block_row)]
                     : std::abs(alpha) > std::abs(block_pivot) + 1e-12;
      }
      if (take) {
        block_t = std::min(t, block_t);
        block_row = i;
        block_pivot = alpha;
        block_target = target;
      }
    }

    if (self_cap <= block_t) {
      if (!std::isfinite(self_cap)) return LpStatus::Unbounded;
      // Bound flip: the entering variable runs to its opposite bound.
      nb_value_[size_t(q)] += double(dir) * self_cap;
      status_[size_t(q)] = dir > 0 ? Status::AtUpper : Status::AtLower;
      compute_basic_values();
      continue;
    }

    int leaving = basis_[size_t(block_row)];
    pivot(block_row, q);
    basis_[size_t(block_row)] = q;
    status_[size_t(q)] = Status::Basic;
    status_[size_t(leaving)] =
        (block_target == lo_[size_t(leaving)]) ? Status::AtLower : Status::AtUpper;
    nb_value_[size_t(leaving)] = block_target;
    compute_basic_values();
  }
}

LpResult SimplexSolver::solve() {
  LpResult result;
  if (!tableau_valid_) build_tableau();
  refresh_nonbasic_values();
  compute_basic_values();

  const int64_t iter_limit =
      iteration_limit > 0 ? iteration_limit : 10000 + int64_t(40) * (m_ + n_struct_);
  int64_t iters = 0;

  int artificials = install_artificials();
  if (artificials > 0) {
    LpStatus st = run_phase(phase1_cost_, iter_limit, &iters);
    if (st == LpStatus::IterationLimit || st == LpStatus::Unbounded) {
      // A phase-1 objective is bounded below by zero, so a ray here is
      // numerical trouble, not information.
      result.status = LpStatus::IterationLimit;
      result.iterations = iters;
      return result;
    }
    double infeasibility = 0.0;
    for (int j = 0; j < n_cols_; ++j) {
      if (phase1_cost_[size_t(j)] == 0.0) continue;
      double v = status_[size_t(j)] == Status::Basic ? 0.0 : nb_value_[size_t(j)];
      infeasibility += phase1_cost_[size_t(j)] * v;
    }
    for (int i = 0; i < m_; ++i)
      infeasibility += phase1_cost_[size_t(basis_[size_t(i)])] * xb_[size_t(i)];
    if (infeasibility > 10.0 * feasibility_tolerance) {
      result.status = LpStatus::Infeasible;
      result.iterations = iters;
      return result;
    }
    // Pin the artificials again for phase 2; basic ones sit at (numerical)
    // zero and act as fixed columns.
    for (int i = 0; i < m_; ++i) {
      int j = n_struct_ + m_ + i;
      lo_[size_t(j)] = up_[size_t(j)] = 0.0;
      if (status_[size_t(j)] != Status::Basic) nb_value_[size_t(j)] = 0.0;
    }
    compute_basic_values();
  }

  LpStatus st = run_phase(cost_, iter_limit, &iters);
  result.iterations = iters;
  if (st != LpStatus::Optimal) {
    result.status = st;
    return result;
  }

  // Assemble the structural solution.
  solution_.assign(size_t(n_struct_), 0.0);
  for (int j = 0; j < n_struct_; ++j)
    if (status_[size_t(j)] != Status::Basic) solution_[size_t(j)] = nb_value_[size_t(j)];
  for (int i = 0; i < m_; ++i) {
    int b = basis_[size_t(i)];
    if (b < n_struct_) solution_[size_t(b)] = xb_[size_t(i)];
  }
  double obj = 0.0;
  for (int j = 0; j < n_struct_; ++j) obj += cost_[size_t(j)] * solution_[size_t(j)];
  objective_ = maximize_ ? -obj : obj;
  result.status = LpStatus::Optimal;
  result.objective = objective_;
  return result;
}

}  // namespace gridforge::milp
