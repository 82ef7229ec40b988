#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridforge/rng.hpp"

namespace gridforge::testing {

namespace {

using milp::kInfinity;
using milp::MipModel;
using milp::Relation;
using milp::Sense;
using milp::VarType;

// Gaussian elimination with partial pivoting on an n x n system.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>* out) {
  const int n = int(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[size_t(r)][size_t(col)]) > std::abs(a[size_t(pivot)][size_t(col)])) pivot = r;
    if (std::abs(a[size_t(pivot)][size_t(col)]) < 1e-11) return false;
    std::swap(a[size_t(pivot)], a[size_t(col)]);
    std::swap(b[size_t(pivot)], b[size_t(col)]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[size_t(r)][size_t(col)] / a[size_t(col)][size_t(col)];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[size_t(r)][size_t(c)] -= f * a[size_t(col)][size_t(c)];
      b[size_t(r)] -= f * b[size_t(col)];
    }
  }
  out->assign(size_t(n), 0.0);
  for (int i = 0; i < n; ++i) (*out)[size_t(i)] = b[size_t(i)] / a[size_t(i)][size_t(i)];
  return true;
}

struct Row {
  std::vector<double> coeffs;
  double rhs;
};

bool feasible_point(const MipModel& model, const std::vector<double>& x, double tol) {
  for (int j = 0; j < model.num_variables(); ++j) {
    if (x[size_t(j)] < model.variable(j).lower - tol) return false;
    if (x[size_t(j)] > model.variable(j).upper + tol) return false;
  }
  for (int i = 0; i < model.num_constraints(); ++i) {
    const milp::Constraint& c = model.constraint(i);
    double lhs = 0.0;
    for (const milp::LinearTerm& t : c.terms) lhs += t.coeff * x[size_t(t.var)];
    switch (c.relation) {
      case Relation::LessEqual:
        if (lhs > c.rhs + tol) return false;
        break;
      case Relation::GreaterEqual:
        if (lhs < c.rhs - tol) return false;
        break;
      case Relation::Equal:
        if (std::abs(lhs - c.rhs) > tol) return false;
        break;
    }
  }
  return true;
}

}  // namespace

std::optional<VertexOptimum> enumerate_lp_vertices(const milp::MipModel& model) {
  const int n = model.num_variables();
  if (n > 4) return std::nullopt;

  // Hyperplane pool: constraints as equalities plus every finite bound.
  std::vector<Row> rows;
  for (int i = 0; i < model.num_constraints(); ++i) {
    Row row;
    row.coeffs.assign(size_t(n), 0.0);
    for (const milp::LinearTerm& t : model.constraint(i).terms)
      row.coeffs[size_t(t.var)] += t.coeff;
    row.rhs = model.constraint(i).rhs;
    rows.push_back(std::move(row));
  }
  for (int j = 0; j < n; ++j) {
    const milp::Variable& v = model.variable(j);
    if (std::isfinite(v.lower)) {
      Row row;
      row.coeffs.assign(size_t(n), 0.0);
      row.coeffs[size_t(j)] = 1.0;
      row.rhs = v.lower;
      rows.push_back(std::move(row));
    }
    if (std::isfinite(v.upper) && v.upper != v.lower) {
      Row row;
      row.coeffs.assign(size_t(n), 0.0);
      row.coeffs[size_t(j)] = 1.0;
      row.rhs = v.upper;
      rows.push_back(std::move(row));
    }
  }

  const bool maximize = model.objective_sense() == Sense::Maximize;
  auto value = [&](const std::vector<double>& x) {
    double v = model.objective_value(x);
    return maximize ? -v : v;
  };

  std::optional<VertexOptimum> best;
  const int m = int(rows.size());
  auto try_subset = [&](const std::vector<int>& subset) {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int r : subset) {
      a.push_back(rows[size_t(r)].coeffs);
      b.push_back(rows[size_t(r)].rhs);
    }
    std::vector<double> x;
    if (!solve_square(a, b, &x)) return;
    if (!feasible_point(model, x, 1e-7)) return;
    double v = value(x);
    if (!best || v < best->objective - 1e-12) best = VertexOptimum{v, x};
  };
  std::vector<int> subset;
  auto rec = [&](auto&& self, int start) -> void {
    if (int(subset.size()) == n) {
      try_subset(subset);
      return;
    }
    for (int r = start; r < m; ++r) {
      subset.push_back(r);
      self(self, r + 1);
      subset.pop_back();
    }
  };
  if (n > 0) rec(rec, 0);

  if (!best) return std::nullopt;

  // Unboundedness scan: an improving feasible point far out along an axis.
  for (int j = 0; j < n; ++j) {
    for (double dir : {1.0, -1.0}) {
      double c = model.objective_coeff(j) * (maximize ? -1.0 : 1.0);
      if (c * dir >= -1e-12) continue;
      std::vector<double> x = best->point;
      x[size_t(j)] += dir * 1e6;
      if (feasible_point(model, x, 1e-3)) return std::nullopt;  // unbounded
    }
  }

  best->objective = maximize ? -best->objective : best->objective;
  return best;
}

std::optional<double> enumerate_mip(const milp::MipModel& model) {
  std::vector<int> binaries;
  std::vector<int> continuous;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variable(j).type == VarType::Binary) binaries.push_back(j);
    else continuous.push_back(j);
  }
  if (binaries.size() > 20) return std::nullopt;

  const bool maximize = model.objective_sense() == Sense::Maximize;
  std::optional<double> best;
  auto consider = [&](double v) {
    if (!best) best = v;
    else if (maximize ? v > *best : v < *best) best = v;
  };

  for (uint64_t mask = 0; mask < (uint64_t(1) << binaries.size()); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < binaries.size() && ok; ++i) {
      double v = double((mask >> i) & 1u);
      const milp::Variable& var = model.variable(binaries[i]);
      if (v < var.lower - 1e-9 || v > var.upper + 1e-9) ok = false;
    }
    if (!ok) continue;

    if (continuous.empty()) {
      std::vector<double> x(size_t(model.num_variables()), 0.0);
      for (std::size_t i = 0; i < binaries.size(); ++i)
        x[size_t(binaries[i])] = double((mask >> i) & 1u);
      if (feasible_point(model, x, 1e-7)) consider(model.objective_value(x));
      continue;
    }

    // Substitute the binaries into the rows and enumerate the continuous
    // remainder by vertices.
    MipModel reduced;
    for (int j : continuous)
      reduced.add_continuous(model.variable(j).name, model.variable(j).lower,
                             model.variable(j).upper);
    reduced.set_objective_sense(model.objective_sense());
    double base = 0.0;
    for (std::size_t i = 0; i < binaries.size(); ++i)
      base += model.objective_coeff(binaries[i]) * double((mask >> i) & 1u);
    for (std::size_t c = 0; c < continuous.size(); ++c)
      reduced.set_objective_coeff(int(c), model.objective_coeff(continuous[c]));
    bool row_ok = true;
    for (int i = 0; i < model.num_constraints() && row_ok; ++i) {
      const milp::Constraint& con = model.constraint(i);
      double shift = 0.0;
      std::vector<milp::LinearTerm> terms;
      for (const milp::LinearTerm& t : con.terms) {
        auto bin_it = std::find(binaries.begin(), binaries.end(), t.var);
        if (bin_it != binaries.end()) {
          std::size_t bit = size_t(bin_it - binaries.begin());
          shift += t.coeff * double((mask >> bit) & 1u);
        } else {
          auto cont_it = std::find(continuous.begin(), continuous.end(), t.var);
          terms.push_back({int(cont_it - continuous.begin()), t.coeff});
        }
      }
      if (terms.empty()) {
        double rhs = con.rhs - shift;
        switch (con.relation) {
          case Relation::LessEqual: row_ok = 0.0 <= rhs + 1e-9; break;
          case Relation::GreaterEqual: row_ok = 0.0 >= rhs - 1e-9; break;
          case Relation::Equal: row_ok = std::abs(rhs) <= 1e-9; break;
        }
      } else {
        reduced.add_constraint(con.name, terms, con.relation, con.rhs - shift);
      }
    }
    if (!row_ok) continue;
    auto vertex = enumerate_lp_vertices(reduced);
    if (vertex) consider(base + vertex->objective);
  }
  return best;
}

std::size_t count_cycles_by_subsets(const NetworkInstance& instance) {
  InstanceIndex index = make_index(instance);
  const int n = int(instance.buses.size());
  if (n > 16) return 0;

  std::vector<std::vector<char>> adj(size_t(n), std::vector<char>(size_t(n), 0));
  for (const Edge& e : instance.edges) {
    int u = index.bus.at(e.from);
    int v = index.bus.at(e.to);
    adj[size_t(u)][size_t(v)] = adj[size_t(v)][size_t(u)] = 1;
  }

  std::size_t count = 0;
  for (uint32_t mask = 0; mask < (uint32_t(1) << n); ++mask) {
    int size = __builtin_popcount(mask);
    if (size < 3) continue;
    // Induced subgraph must be 2-regular and connected: exactly one cycle
    // through every chosen vertex.
    bool regular = true;
    for (int v = 0; v < n && regular; ++v) {
      if (!((mask >> v) & 1u)) continue;
      int deg = 0;
      for (int w = 0; w < n; ++w)
        if (((mask >> w) & 1u) && adj[size_t(v)][size_t(w)]) ++deg;
      if (deg != 2) regular = false;
    }
    if (!regular) continue;
    int start = __builtin_ctz(mask);
    uint32_t seen = uint32_t(1) << start;
    std::vector<int> stack{start};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        if (!((mask >> w) & 1u) || !adj[size_t(v)][size_t(w)]) continue;
        if (!((seen >> w) & 1u)) {
          seen |= uint32_t(1) << w;
          stack.push_back(w);
        }
      }
    }
    if (seen == mask) ++count;
  }
  return count;
}

bool closed_lines_form_forest(const NetworkInstance& instance, const ScenarioOperation& op) {
  InstanceIndex index = make_index(instance);
  std::vector<int> parent(instance.buses.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[size_t(v)] != v) {
      parent[size_t(v)] = parent[size_t(parent[size_t(v)])];
      v = parent[size_t(v)];
    }
    return v;
  };
  for (std::size_t e = 0; e < instance.edges.size(); ++e) {
    if (!op.line_used[e] || op.switch_open[e]) continue;
    int a = find(index.bus.at(instance.edges[e].from));
    int b = find(index.bus.at(instance.edges[e].to));
    if (a == b) return false;  // closing this line completes a loop
    parent[size_t(a)] = b;
  }
  return true;
}

bool phase_balance_holds(const NetworkInstance& instance, const ScenarioOperation& op,
                         double tolerance) {
  for (std::size_t e = 0; e < instance.edges.size(); ++e) {
    const Edge& edge = instance.edges[e];
    if (edge.phases.size() < 2) continue;
    double sum = 0.0;
    double magnitude = 0.0;
    for (Phase p : kAllPhases) {
      if (!edge.phases.contains(p)) continue;
      sum += op.flow[e][size_t(static_cast<int>(p))];
      magnitude = std::max(magnitude, std::abs(op.flow[e][size_t(static_cast<int>(p))]));
    }
    if (magnitude <= tolerance) continue;
    double sign = sum >= 0.0 ? 1.0 : -1.0;
    double avg = sign * sum / double(edge.phases.size());
    double beta = edge.phase_imbalance_limit;
    for (Phase p : kAllPhases) {
      if (!edge.phases.contains(p)) continue;
      double f = sign * op.flow[e][size_t(static_cast<int>(p))];
      if (f < (1.0 - beta) * avg - tolerance) return false;
      if (f > (1.0 + beta) * avg + tolerance) return false;
    }
  }
  return true;
}

milp::MipModel random_lp(uint64_t seed) {
  SplitMix64 rng(seed * 1000003ull + 17ull);
  MipModel m;
  int n = 2 + int(rng.next_below(2));
  for (int j = 0; j < n; ++j)
    m.add_continuous("x" + std::to_string(j), 0.0, rng.next_unit() < 0.7 ? 10.0 : kInfinity);
  int rows = 2 + int(rng.next_below(3));
  for (int i = 0; i < rows; ++i) {
    std::vector<milp::LinearTerm> terms;
    for (int j = 0; j < n; ++j) {
      double c = std::round(rng.next_real(-3.0, 5.0));
      if (c != 0.0) terms.push_back({j, c});
    }
    if (terms.empty()) terms.push_back({0, 1.0});
    Relation rel = rng.next_unit() < 0.6 ? Relation::LessEqual : Relation::GreaterEqual;
    m.add_constraint("r" + std::to_string(i), terms, rel, std::round(rng.next_real(1.0, 12.0)));
  }
  for (int j = 0; j < n; ++j) m.set_objective_coeff(j, std::round(rng.next_real(1.0, 6.0)));
  if (rng.next_unit() < 0.3) m.set_objective_sense(Sense::Maximize);
  return m;
}

milp::MipModel random_mip(uint64_t seed, int binaries, bool with_continuous) {
  SplitMix64 rng(seed * 69069ull + 5ull);
  MipModel m;
  for (int j = 0; j < binaries; ++j) m.add_binary("b" + std::to_string(j));
  int n_cont = with_continuous ? 1 + int(rng.next_below(2)) : 0;
  for (int j = 0; j < n_cont; ++j) m.add_continuous("x" + std::to_string(j), 0.0, 10.0);
  int total = binaries + n_cont;
  int rows = 2 + int(rng.next_below(3));
  for (int i = 0; i < rows; ++i) {
    std::vector<milp::LinearTerm> terms;
    for (int j = 0; j < total; ++j) {
      double c = std::round(rng.next_real(-4.0, 6.0));
      if (c != 0.0) terms.push_back({j, c});
    }
    if (terms.empty()) terms.push_back({int(rng.next_below(uint64_t(total))), 1.0});
    Relation rel = rng.next_unit() < 0.7 ? Relation::LessEqual : Relation::GreaterEqual;
    m.add_constraint("r" + std::to_string(i), terms, rel,
                     std::round(rng.next_real(0.0, 3.0 * double(total))));
  }
  for (int j = 0; j < total; ++j) m.set_objective_coeff(j, std::round(rng.next_real(-5.0, 9.0)));
  if (rng.next_unit() < 0.5) m.set_objective_sense(Sense::Maximize);
  return m;
}

}  // namespace gridforge::testing
