#ifndef GRIDFORGE_MILP_MODEL_HPP
#define GRIDFORGE_MILP_MODEL_HPP

#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gridforge/errors.hpp"

namespace gridforge::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Binary };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Sense { Minimize, Maximize };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  VarType type = VarType::Continuous;
};

struct LinearTerm {
  int var = 0;
  double coeff = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

// Plain container for a mixed binary/continuous linear program. Variable and
// constraint names are unique; coefficients always reference declared
// variables (enforced at insertion).
class MipModel {
 public:
  int add_variable(const std::string& name, double lower, double upper, VarType type);
  int add_binary(const std::string& name) { return add_variable(name, 0.0, 1.0, VarType::Binary); }
  int add_continuous(const std::string& name, double lower, double upper) {
    return add_variable(name, lower, upper, VarType::Continuous);
  }

  int add_constraint(const std::string& name, std::vector<LinearTerm> terms, Relation rel,
                     double rhs);
  void add_term_to_constraint(int constraint, int var, double coeff);

  void set_bounds(int var, double lower, double upper);
  // Higher classes branch first; within a class the most fractional wins.
  void set_branching_priority(int var, int priority) {
    priorities_.at(size_t(var)) = priority;
  }
  int branching_priority(int var) const { return priorities_.at(size_t(var)); }
  void set_objective_sense(Sense sense) { sense_ = sense; }
  void set_objective_coeff(int var, double coeff) { objective_.at(size_t(var)) = coeff; }
  void add_objective_coeff(int var, double coeff) { objective_.at(size_t(var)) += coeff; }

  int num_variables() const { return int(vars_.size()); }
  int num_constraints() const { return int(cons_.size()); }
  const Variable& variable(int i) const { return vars_.at(size_t(i)); }
  const Constraint& constraint(int i) const { return cons_.at(size_t(i)); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return cons_; }
  Sense objective_sense() const { return sense_; }
  double objective_coeff(int var) const { return objective_.at(size_t(var)); }
  const std::vector<double>& objective() const { return objective_; }

  // -1 when absent.
  int find_variable(const std::string& name) const;
  int find_constraint(const std::string& name) const;
  // Throwing lookup.
  int variable_index(const std::string& name) const;

  double objective_value(const std::vector<double>& assignment) const;

  // Largest constraint violation of an assignment (0 when feasible).
  double max_constraint_violation(const std::vector<double>& assignment) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  std::vector<double> objective_;
  std::vector<int> priorities_;
  Sense sense_ = Sense::Minimize;
  std::unordered_map<std::string, int> var_index_;
  std::unordered_map<std::string, int> con_index_;
};

// Copy of `model` with lower = upper = value for every listed variable.
// Throws UnknownVariable / ValueOutOfBounds.
MipModel fix_assignment(const MipModel& model,
                        const std::vector<std::pair<std::string, double>>& fixes);

}  // namespace gridforge::milp

#endif
