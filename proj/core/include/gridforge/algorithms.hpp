#ifndef GRIDFORGE_ALGORITHMS_HPP
#define GRIDFORGE_ALGORITHMS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridforge/formulation.hpp"

namespace gridforge {

// Variable neighborhood search controls (paper-default values).
struct VnsParams {
  int max_restarts = 10;
  int max_iterations = 4;
  double max_time_seconds = 48.0 * 3600.0;
  int d = 2;  // neighborhood divisor
  uint64_t shuffle_seed = 0;
};

struct AlgorithmParams {
  milp::SolveParams mip;           // inner solver controls
  std::optional<double> epsilon;   // chance-constraint fraction (extensive only)
  VnsParams vns;
  int initial_scenario = 0;        // SBD seed scenario
  bool record_trace = true;
};

enum class ReportStatus { Optimal, Feasible, Infeasible, TimeLimit };
std::string to_string(ReportStatus s);

// One machine-readable event per algorithm step; serialized as JSON lines.
struct TraceEvent {
  std::string event;
  int64_t step = 0;
  double value = 0.0;
  int scenario = -1;
  int k = -1;
  double objective = 0.0;
};

struct SolveReport {
  ReportStatus status = ReportStatus::Infeasible;
  std::string algorithm;
  Design design;
  double objective = 0.0;  // true investment cost of `design`
  double bound = 0.0;      // dual bound when the solve was exact
  std::vector<PricingResult> per_scenario;
  std::vector<uint8_t> chance_excused;  // per scenario; filled on chance-relaxed solves
  std::vector<TraceEvent> trace;
  double wall_time_seconds = 0.0;
  int64_t master_solves = 0;
  int64_t pricing_solves = 0;
};

// A design at or below this shortfall counts as serving a scenario.
inline constexpr double kInfeasibilityTolerance = 1e-6;

// Exact extensive-form solve of the full two-stage model (optionally
// chance-relaxed via params.epsilon).
SolveReport solve_extensive(const NetworkInstance& instance, const ScenarioSet& scenarios,
                            const AlgorithmParams& params = {});

// Scenario-based decomposition: exact masters over a growing scenario subset,
// adding the worst-priced scenario until all prices are zero. Optimal.
SolveReport solve_sbd(const NetworkInstance& instance, const ScenarioSet& scenarios,
                      const AlgorithmParams& params = {});

// Per-scenario solves combined by componentwise max, then switch repair.
SolveReport solve_greedy(const NetworkInstance& instance, const ScenarioSet& scenarios,
                         const AlgorithmParams& params = {});

// Adds whatever switches the scenarios need once every built line that
// survives a scenario is energized; returns the augmented design.
Design repair_switches(const NetworkInstance& instance, const Design& design,
                       const ScenarioSet& scenarios, const CycleSet& cycles,
                       const milp::SolveParams& mip = {});

// Variable neighborhood search over the first-stage variables, seeded with a
// feasible design (the greedy output unless the caller has a better one).
SolveReport solve_vns(const NetworkInstance& instance, const ScenarioSet& scenarios,
                      const Design& initial_design, const AlgorithmParams& params = {});

// SBD with the exact master solve replaced by greedy-seeded VNS; pricing
// stays exact, so the result is feasible for every scenario.
SolveReport solve_sbvnds(const NetworkInstance& instance, const ScenarioSet& scenarios,
                         const AlgorithmParams& params = {});

// One pricing solve per scenario for a fixed design.
std::vector<PricingResult> evaluate_design(const NetworkInstance& instance,
                                           const ScenarioSet& scenarios, const Design& design,
                                           const milp::SolveParams& mip = {});

// Exhaustive enumeration over the candidate first-stage binaries with
// capacities optimized per assignment. Verification oracle; throws TooLarge
// above max_binaries.
SolveReport brute_force_oracle(const NetworkInstance& instance, const ScenarioSet& scenarios,
                               int max_binaries = 16, const milp::SolveParams& mip = {});

std::string trace_to_json_lines(const std::vector<TraceEvent>& trace);

// Dispatch by name: extensive|sbd|greedy|vns|sbvnds ("vns" seeds itself with
// the greedy design). Throws Error on unknown names or unsupported
// combinations (chance constraints need the extensive solve).
SolveReport solve_with_algorithm(const std::string& name, const NetworkInstance& instance,
                                 const ScenarioSet& scenarios, const AlgorithmParams& params = {});

}  // namespace gridforge

#endif
