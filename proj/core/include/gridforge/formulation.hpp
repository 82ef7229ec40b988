#ifndef GRIDFORGE_FORMULATION_HPP
#define GRIDFORGE_FORMULATION_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gridforge/cycles.hpp"
#include "gridforge/milp/model.hpp"
#include "gridforge/milp/solve.hpp"
#include "gridforge/network.hpp"
#include "gridforge/scenario.hpp"

namespace gridforge {

// First-stage (investment) decisions, indexed like the instance.
struct Design {
  std::vector<uint8_t> line_built;      // per edge; existing edges are 1
  std::vector<uint8_t> switch_built;    // per edge; existing switches are 1
  std::vector<uint8_t> hardened;        // per edge
  std::vector<uint8_t> facility_built;  // per bus
  std::vector<PerPhase> new_capacity;   // per bus

  static Design empty_for(const NetworkInstance& instance);
};

// Investment cost of a design under the instance's catalog; pre-existing
// components cost nothing.
double design_cost(const NetworkInstance& instance, const Design& design);

// Checks design shape and invariants (binary flags, capacity within the
// facility cap, switches only on built lines, hardening only where allowed).
std::vector<std::string> validate_design(const NetworkInstance& instance, const Design& design);

// Second-stage (operations) decisions for one scenario, extracted from a
// solved model.
struct ScenarioOperation {
  int scenario_id = 0;
  std::vector<uint8_t> line_used;       // per edge
  std::vector<uint8_t> switch_open;     // per edge
  std::vector<uint8_t> harden_used;     // per edge
  std::vector<uint8_t> direction_neg;   // per edge
  std::vector<uint8_t> direction_pos;   // per edge
  std::vector<PerPhase> flow;           // per edge, signed (positive = from -> to)
  std::vector<uint8_t> facility_used;   // per bus
  std::vector<PerPhase> capacity_used;  // per bus
  std::vector<PerPhase> generation;     // per bus
  std::vector<PerPhase> served_load;    // per bus
  std::vector<std::vector<uint8_t>> block_served;  // per bus, per load block
  bool chance_violated = false;
};

// Model-variable indices for one scenario block; -1 marks absent slots.
struct ScenarioVars {
  int scenario_id = 0;
  std::vector<int> line_used, switch_open, harden_used, direction_neg, direction_pos;
  std::vector<std::array<int, 3>> flow;
  std::vector<int> facility_used;
  std::vector<std::array<int, 3>> capacity_used, generation, served_load;
  std::vector<std::vector<int>> block_served;
  std::vector<int> cycle_line, cycle_switch;  // per reduced edge
  int chance_var = -1;
};

enum class FirstStageKind { LineBuilt, SwitchBuilt, Hardened, FacilityBuilt, NewCapacity };

struct FirstStageVar {
  FirstStageKind kind;
  int edge = -1;  // for line/switch/harden
  int bus = -1;   // for facility/capacity
  int phase = -1;
  int var = -1;          // model variable index
  double cost = 0.0;     // true catalog cost
  bool fixed = false;    // pre-existing component, pinned to fixed_value
  double fixed_value = 0.0;
  double capacity_cap = 0.0;  // M_{i,k} for NewCapacity entries
};

struct MasterModel {
  milp::MipModel model;
  std::vector<FirstStageVar> first_stage;  // deterministic order
  std::vector<int> decision_slots;         // first_stage indices of non-fixed entries
  // Lookup tables from instance indices into first_stage (-1 when absent).
  std::vector<int> line_slot, switch_slot, harden_slot, facility_slot;
  std::vector<std::array<int, 3>> capacity_slot;
  std::vector<ScenarioVars> scenarios;
  std::vector<int> scenario_ids;
  double lambda = kDefaultCriticalFraction;
  double gamma = kDefaultTotalFraction;
  std::optional<double> epsilon;  // set once chance-relaxed
  int chance_budget_row = -1;
};

struct MasterOptions {
  // Deterministic tie-breaking: a tiny index-scaled surcharge on first-stage
  // objective coefficients so equal-cost optima resolve toward low indices.
  // Reported objectives are always recomputed from true costs.
  bool perturb_ties = true;
};

// Full two-stage model over the given scenarios (all of them when
// scenario_ids is empty): first-stage investment objective, linking rows, and
// one feasible-network block per scenario.
MasterModel build_master(const NetworkInstance& instance, const ScenarioSet& scenarios,
                         const CycleSet& cycles, const std::vector<int>& scenario_ids = {},
                         const MasterOptions& options = {});

// Relaxes the two service rows of every scenario block with a per-scenario
// excuse binary and adds the budget row (sum z_s <= epsilon * |S|).
void apply_chance_relaxation(MasterModel& master, double epsilon);

// Standalone feasible-network block for one scenario (no first-stage linking,
// service rows included); exposed for inspection and tests.
struct ScenarioBlockModel {
  milp::MipModel model;
  ScenarioVars vars;
};
ScenarioBlockModel build_scenario_block(const NetworkInstance& instance, const Scenario& scenario,
                                        const CycleSet& cycles);

// Scenario-pricing problem for a fixed design: service rows dropped, the
// objective maximizes the lambda/gamma-capped served fractions, so the
// optimum hits lambda + gamma exactly when the scenario is survivable.
struct PricingModel {
  milp::MipModel model;
  ScenarioVars vars;
  int crit_capped_var = -1;   // -1 when there is no critical demand
  int total_capped_var = -1;  // -1 when there is no non-critical demand
  double critical_demand = 0.0;
  double total_demand = 0.0;  // demand at non-critical buses
  double lambda = 0.0;
  double gamma = 0.0;
};
PricingModel build_pricing_model(const NetworkInstance& instance, const Scenario& scenario,
                                 const Design& design, const CycleSet& cycles);

struct PricingResult {
  double l_value = 0.0;  // infeasibility measure; 0 iff the scenario is survivable
  double served_critical_fraction = 1.0;
  double served_total_fraction = 1.0;
  ScenarioOperation operation;
};

PricingResult solve_pricing(const NetworkInstance& instance, const Scenario& scenario,
                            const Design& design, const CycleSet& cycles,
                            const milp::SolveParams& params = {});

// Switch-repair subproblem for one scenario: every built line that survives
// the scenario is energized, service rows stay on, switch installation is a
// decision (switches already in the design cost nothing) and the objective
// minimizes the cost of newly added switches.
struct RepairModel {
  milp::MipModel model;
  ScenarioVars vars;
  std::vector<int> switch_build_vars;  // per edge
};
RepairModel build_repair_model(const NetworkInstance& instance, const Scenario& scenario,
                               const Design& design, const CycleSet& cycles);

// Extraction helpers.
Design extract_design(const NetworkInstance& instance, const MasterModel& master,
                      const std::vector<double>& assignment);
ScenarioOperation extract_operation(const NetworkInstance& instance, const ScenarioVars& vars,
                                    const std::vector<double>& assignment);

// Weights of the pricing objective; both 1 per the default measure.
inline constexpr double kPricingCriticalWeight = 1.0;
inline constexpr double kPricingTotalWeight = 1.0;

}  // namespace gridforge

#endif
