#include "gridforge/milp/model.hpp"

#include <cmath>

namespace gridforge::milp {

int MipModel::add_variable(const std::string& name, double lower, double upper, VarType type) {
  if (name.empty()) throw Error("variable name must not be empty");
  if (var_index_.count(name)) throw Error("duplicate variable name: " + name);
  if (type == VarType::Binary && (lower < 0.0 || upper > 1.0))
    throw Error("binary variable bounds must lie within [0, 1]: " + name);
  if (lower > upper) throw Error("variable lower bound exceeds upper bound: " + name);
  int idx = int(vars_.size());
  vars_.push_back({name, lower, upper, type});
  objective_.push_back(0.0);
  priorities_.push_back(0);
  var_index_.emplace(name, idx);
  return idx;
}

int MipModel::add_constraint(const std::string& name, std::vector<LinearTerm> terms, Relation rel,
                             double rhs) {
  if (name.empty()) throw Error("constraint name must not be empty");
  if (con_index_.count(name)) throw Error("duplicate constraint name: " + name);
  for (const LinearTerm& t : terms)
    if (t.var < 0 || t.var >= int(vars_.size()))
      throw Error("constraint " + name + " references undeclared variable index");
  int idx = int(cons_.size());
  cons_.push_back({name, std::move(terms), rel, rhs});
  con_index_.emplace(name, idx);
  return idx;
}

void MipModel::add_term_to_constraint(int constraint, int var, double coeff) {
  if (var < 0 || var >= int(vars_.size())) throw Error("undeclared variable index");
  cons_.at(size_t(constraint)).terms.push_back({var, coeff});
}

void MipModel::set_bounds(int var, double lower, double upper) {
  Variable& v = vars_.at(size_t(var));
  if (lower > upper) throw Error("variable lower bound exceeds upper bound: " + v.name);
  v.lower = lower;
  v.upper = upper;
}

int MipModel::find_variable(const std::string& name) const {
  auto it = var_index_.find(name);
  return it == var_index_.end() ? -1 : it->second;
}

int MipModel::find_constraint(const std::string& name) const {
  auto it = con_index_.find(name);
  return it == con_index_.end() ? -1 : it->second;
}

int MipModel::variable_index(const std::string& name) const {
  int idx = find_variable(name);
  if (idx < 0) throw UnknownVariable(name);
  return idx;
}

double MipModel::objective_value(const std::vector<double>& assignment) const {
  double total = 0.0;
  for (std::size_t i = 0; i < objective_.size(); ++i) total += objective_[i] * assignment.at(i);
  return total;
}

double MipModel::max_constraint_violation(const std::vector<double>& assignment) const {
  double worst = 0.0;
  for (const Constraint& c : cons_) {
    double lhs = 0.0;
    for (const LinearTerm& t : c.terms) lhs += t.coeff * assignment.at(size_t(t.var));
    double violation = 0.0;
    switch (c.relation) {
      case Relation::LessEqual: violation = lhs - c.rhs; break;
      case Relation::GreaterEqual: violation = c.rhs - lhs; break;
      case Relation::Equal: violation = std::abs(lhs - c.rhs); break;
    }
    worst = std::max(worst, violation);
  }
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    worst = std::max(worst, vars_[i].lower - assignment.at(i));
    worst = std::max(worst, assignment.at(i) - vars_[i].upper);
  }
  return worst;
}

MipModel fix_assignment(const MipModel& model,
                        const std::vector<std::pair<std::string, double>>& fixes) {
  MipModel fixed = model;
  for (const auto& [name, value] : fixes) {
    int idx = fixed.find_variable(name);
    if (idx < 0) throw UnknownVariable(name);
    const Variable& v = fixed.variable(idx);
    if (value < v.lower - 1e-12 || value > v.upper + 1e-12) throw ValueOutOfBounds(name, value);
    fixed.set_bounds(idx, value, value);
  }
  return fixed;
}

}  // namespace gridforge::milp
