#include "gridforge/algorithms.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "gridforge/rng.hpp"

namespace gridforge {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

ScenarioSet subset_of(const ScenarioSet& all, const std::vector<int>& ids) {
  ScenarioSet sub;
  sub.source_model = all.source_model;
  sub.rng_algorithm = all.rng_algorithm;
  for (int id : ids) sub.scenarios.push_back(all.scenarios.at(size_t(id)));
  return sub;
}

double design_slot_value(const Design& design, const FirstStageVar& fs) {
  switch (fs.kind) {
    case FirstStageKind::LineBuilt: return double(design.line_built[size_t(fs.edge)]);
    case FirstStageKind::SwitchBuilt: return double(design.switch_built[size_t(fs.edge)]);
    case FirstStageKind::Hardened: return double(design.hardened[size_t(fs.edge)]);
    case FirstStageKind::FacilityBuilt: return double(design.facility_built[size_t(fs.bus)]);
    case FirstStageKind::NewCapacity:
      return design.new_capacity[size_t(fs.bus)][size_t(fs.phase)];
  }
  return 0.0;
}

// Objective value of a design under the (perturbed) master coefficients; only
// first-stage variables carry cost, so this is exact.
double perturbed_design_value(const MasterModel& master, const Design& design) {
  double total = 0.0;
  for (const FirstStageVar& fs : master.first_stage)
    total += master.model.objective_coeff(fs.var) * design_slot_value(design, fs);
  return total;
}

std::vector<PricingResult> evaluate_with_cycles(const NetworkInstance& instance,
                                                const ScenarioSet& scenarios, const Design& design,
                                                const CycleSet& cycles,
                                                const milp::SolveParams& mip,
                                                int64_t* pricing_count) {
  std::vector<PricingResult> results;
  results.reserve(scenarios.size());
  for (const Scenario& s : scenarios.scenarios) {
    results.push_back(solve_pricing(instance, s, design, cycles, mip));
    if (pricing_count) ++*pricing_count;
  }
  return results;
}

double max_l(const std::vector<PricingResult>& results) {
  double worst = 0.0;
  for (const PricingResult& r : results) worst = std::max(worst, r.l_value);
  return worst;
}

void push_event(SolveReport& report, bool enabled, const std::string& event, int64_t step,
                double value, int scenario = -1, int k = -1, double objective = 0.0) {
  if (!enabled) return;
  report.trace.push_back({event, step, value, scenario, k, objective});
}

milp::SolveParams sliced(const milp::SolveParams& mip, double remaining) {
  milp::SolveParams out = mip;
  out.time_limit_seconds = std::max(0.0, std::min(out.time_limit_seconds, remaining));
  return out;
}

}  // namespace

std::string to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::Optimal: return "Optimal";
    case ReportStatus::Feasible: return "Feasible";
    case ReportStatus::Infeasible: return "Infeasible";
    case ReportStatus::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

std::string trace_to_json_lines(const std::vector<TraceEvent>& trace) {
  std::ostringstream os;
  for (const TraceEvent& e : trace) {
    os << "{\"event\":\"" << e.event << "\",\"step\":" << e.step << ",\"scenario\":" << e.scenario
       << ",\"k\":" << e.k << ",\"value\":" << format_number(e.value)
       << ",\"objective\":" << format_number(e.objective) << "}\n";
  }
  return os.str();
}

SolveReport solve_extensive(const NetworkInstance& instance, const ScenarioSet& scenarios,
                            const AlgorithmParams& params) {
  const auto start = Clock::now();
  SolveReport report;
  report.algorithm = "extensive";

  CycleSet cycles = enumerate_cycles(instance);
  MasterModel master = build_master(instance, scenarios, cycles);
  if (params.epsilon) apply_chance_relaxation(master, *params.epsilon);

  milp::MipSolution sol = milp::solve_mip(master.model, params.mip);
  ++report.master_solves;

  switch (sol.status) {
    case milp::SolveStatus::Optimal: report.status = ReportStatus::Optimal; break;
    case milp::SolveStatus::Infeasible: report.status = ReportStatus::Infeasible; break;
    case milp::SolveStatus::Unbounded: report.status = ReportStatus::TimeLimit; break;
    case milp::SolveStatus::TimeLimit: report.status = ReportStatus::TimeLimit; break;
  }

  if (sol.has_solution()) {
    report.design = extract_design(instance, master, sol.assignment);
    report.objective = design_cost(instance, report.design);
    report.bound = report.status == ReportStatus::Optimal ? report.objective : sol.bound;
    if (params.epsilon) {
      report.chance_excused.assign(scenarios.size(), 0);
      for (const ScenarioVars& vars : master.scenarios)
        if (vars.chance_var >= 0 && sol.assignment[size_t(vars.chance_var)] >= 0.5)
          report.chance_excused[size_t(vars.scenario_id)] = 1;
    }
    double remaining = params.mip.time_limit_seconds - elapsed_seconds(start);
    report.per_scenario = evaluate_with_cycles(instance, scenarios, report.design, cycles,
                                               sliced(params.mip, std::max(remaining, 1.0)),
                                               &report.pricing_solves);
  }
  report.wall_time_seconds = elapsed_seconds(start);
  return report;
}

SolveReport solve_sbd(const NetworkInstance& instance, const ScenarioSet& scenarios,
                      const AlgorithmParams& params) {
  const auto start = Clock::now();
  SolveReport report;
  report.algorithm = "sbd";

  if (scenarios.size() == 0) {
    SolveReport base = solve_extensive(instance, scenarios, params);
    base.algorithm = "sbd";
    return base;
  }

  CycleSet cycles = enumerate_cycles(instance);
  int first = std::clamp(params.initial_scenario, 0, int(scenarios.size()) - 1);
  std::vector<int> active{first};
  std::vector<char> in_active(scenarios.size(), 0);
  in_active[size_t(first)] = 1;

  int64_t iteration = 0;
  while (true) {
    ++iteration;
    double remaining = params.mip.time_limit_seconds - elapsed_seconds(start);
    if (remaining <= 0.0) {
      report.status = ReportStatus::TimeLimit;
      break;
    }

    MasterModel master = build_master(instance, scenarios, cycles, active);
    milp::MipSolution sol = milp::solve_mip(master.model, sliced(params.mip, remaining));
    ++report.master_solves;

    if (sol.status == milp::SolveStatus::Infeasible) {
      // Infeasible on a subset implies infeasible on the whole set.
      report.status = ReportStatus::Infeasible;
      report.wall_time_seconds = elapsed_seconds(start);
      return report;
    }
    if (sol.status != milp::SolveStatus::Optimal) {
      report.status = ReportStatus::TimeLimit;
      if (sol.has_solution()) {
        report.design = extract_design(instance, master, sol.assignment);
        report.objective = design_cost(instance, report.design);
      }
      break;
    }

    report.design = extract_design(instance, master, sol.assignment);
    report.objective = design_cost(instance, report.design);
    push_event(report, params.record_trace, "sbd_master", iteration, double(active.size()), -1, -1,
               report.objective);

    // Price the design on every scenario still outside the active set.
    int worst_id = -1;
    double worst_l = 0.0;
    for (int s = 0; s < int(scenarios.size()); ++s) {
      if (in_active[size_t(s)]) continue;
      double rem = params.mip.time_limit_seconds - elapsed_seconds(start);
      PricingResult pr = solve_pricing(instance, scenarios.scenarios[size_t(s)], report.design,
                                       cycles, sliced(params.mip, std::max(rem, 1.0)));
      ++report.pricing_solves;
      push_event(report, params.record_trace, "sbd_price", iteration, pr.l_value, s);
      if (pr.l_value > worst_l + 1e-12) {
        worst_l = pr.l_value;
        worst_id = s;
      }
    }

    if (worst_id < 0 || worst_l <= kInfeasibilityTolerance) {
      report.status = ReportStatus::Optimal;
      report.bound = report.objective;
      break;
    }
    active.push_back(worst_id);
    std::sort(active.begin(), active.end());
    in_active[size_t(worst_id)] = 1;
    push_event(report, params.record_trace, "sbd_add", iteration, worst_l, worst_id);
  }

  if (!report.design.line_built.empty()) {
    double rem = params.mip.time_limit_seconds - elapsed_seconds(start);
    report.per_scenario = evaluate_with_cycles(instance, scenarios, report.design, cycles,
                                               sliced(params.mip, std::max(rem, 1.0)),
                                               &report.pricing_solves);
  }
  report.wall_time_seconds = elapsed_seconds(start);
  return report;
}

SolveReport solve_greedy(const NetworkInstance& instance, const ScenarioSet& scenarios,
                         const AlgorithmParams& params) {
  const auto start = Clock::now();
  SolveReport report;
  report.algorithm = "greedy";

  CycleSet cycles = enumerate_cycles(instance);
  Design combined = Design::empty_for(instance);

  for (int s = 0; s < int(scenarios.size()); ++s) {
    double remaining = params.mip.time_limit_seconds - elapsed_seconds(start);
    if (remaining <= 0.0) {
      report.status = ReportStatus::TimeLimit;
      report.wall_time_seconds = elapsed_seconds(start);
      return report;
    }
    MasterModel master = build_master(instance, scenarios, cycles, {s});
    milp::MipSolution sol = milp::solve_mip(master.model, sliced(params.mip, remaining));
    ++report.master_solves;
    if (sol.status == milp::SolveStatus::Infeasible) {
      // A scenario that cannot be served alone makes the whole problem
      // infeasible.
      report.status = ReportStatus::Infeasible;
      push_event(report, params.record_trace, "greedy_infeasible", s, 0.0, s);
      report.wall_time_seconds = elapsed_seconds(start);
      return report;
    }
    if (sol.status != milp::SolveStatus::Optimal) {
      report.status = ReportStatus::TimeLimit;
      report.wall_time_seconds = elapsed_seconds(start);
      return report;
    }
    Design d = extract_design(instance, master, sol.assignment);
    push_event(report, params.record_trace, "greedy_scenario", s, design_cost(instance, d), s);

    // Componentwise max: OR on the binaries, max on the capacities.
    for (std::size_t e = 0; e < combined.line_built.size(); ++e) {
      combined.line_built[e] |= d.line_built[e];
      combined.switch_built[e] |= d.switch_built[e];
      combined.hardened[e] |= d.hardened[e];
    }
    for (std::size_t b = 0; b < combined.facility_built.size(); ++b) {
      combined.facility_built[b] |= d.facility_built[b];
      for (int k = 0; k < kNumPhases; ++k)
        combined.new_capacity[b][size_t(k)] =
            std::max(combined.new_capacity[b][size_t(k)], d.new_capacity[b][size_t(k)]);
    }
  }

  double rem = params.mip.time_limit_seconds - elapsed_seconds(start);
  combined = repair_switches(instance, combined, scenarios, cycles,
                             sliced(params.mip, std::max(rem, 1.0)));
  report.design = combined;
  report.objective = design_cost(instance, combined);

  rem = params.mip.time_limit_seconds - elapsed_seconds(start);
  report.per_scenario = evaluate_with_cycles(instance, scenarios, combined, cycles,
                                             sliced(params.mip, std::max(rem, 1.0)),
                                             &report.pricing_solves);
  report.status =
      max_l(report.per_scenario) <= kInfeasibilityTolerance ? ReportStatus::Feasible
                                                            : ReportStatus::Infeasible;
  report.wall_time_seconds = elapsed_seconds(start);
  return report;
}

Design repair_switches(const NetworkInstance& instance, const Design& design,
                       const ScenarioSet& scenarios, const CycleSet& cycles,
                       const milp::SolveParams& mip) {
  Design repaired = design;
  for (const Scenario& scenario : scenarios.scenarios) {
    RepairModel repair = build_repair_model(instance, scenario, repaired, cycles);
    milp::SolveParams local = mip;
    local.cutoff.reset();
    milp::MipSolution sol = milp::solve_mip(repair.model, local);
    if (!sol.has_solution())
      throw Error("switch repair subproblem unsolved for scenario " +
                  std::to_string(scenario.id));
    for (std::size_t e = 0; e < instance.edges.size(); ++e) {
      int var = repair.switch_build_vars[e];
      if (var >= 0 && sol.assignment[size_t(var)] >= 0.5) repaired.switch_built[e] = 1;
    }
  }
  return repaired;
}

SolveReport solve_vns(const NetworkInstance& instance, const ScenarioSet& scenarios,
                      const Design& initial_design, const AlgorithmParams& params) {
  const auto start = Clock::now();
  SolveReport report;
  report.algorithm = "vns";

  CycleSet cycles = enumerate_cycles(instance);
  MasterModel master = build_master(instance, scenarios, cycles);

  Design best = initial_design;
  double best_cost = design_cost(instance, best);
  double best_perturbed = perturbed_design_value(master, best);

  const std::vector<int>& slots = master.decision_slots;
  const VnsParams& vp = params.vns;
  const double max_time = std::min(vp.max_time_seconds, params.mip.time_limit_seconds);
  const double slice =
      max_time / std::max(1.0, double(vp.max_restarts) * double(vp.max_iterations));

  // sigma^LP: the continuous relaxation of the full master, solved once.
  std::vector<double> lp_values(slots.size(), 0.0);
  {
    milp::MipSolution lp = milp::solve_lp(master.model);
    ++report.master_solves;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const FirstStageVar& fs = master.first_stage[size_t(slots[i])];
      lp_values[i] = lp.has_solution() ? lp.assignment[size_t(fs.var)]
                                       : design_slot_value(best, fs);
    }
  }

  SplitMix64 shuffle_rng(vp.shuffle_seed);
  bool restart = false;
  int restarts = 0;
  int64_t step_counter = 0;

  while (elapsed_seconds(start) < max_time && restarts < vp.max_restarts) {
    // Distance of the incumbent to the LP point, capacities normalized.
    std::vector<double> diff(slots.size(), 0.0);
    int n = 0;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const FirstStageVar& fs = master.first_stage[size_t(slots[i])];
      double v = design_slot_value(best, fs);
      double scale = fs.kind == FirstStageKind::NewCapacity ? std::max(fs.capacity_cap, 1e-12) : 1.0;
      diff[i] = std::abs(v - lp_values[i]) / scale;
      if (diff[i] > 1e-6) ++n;
    }
    std::vector<int> order(slots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[size_t(i)] = int(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return diff[size_t(a)] < diff[size_t(b)]; });

    int step;
    if (restart) {
      ++restarts;
      step = (4 * n) / vp.d;
      shuffle_rng.shuffle(order.begin(), order.end());
      push_event(report, params.record_trace, "vns_restart", ++step_counter, double(restarts));
    } else {
      step = n / vp.d;
    }
    int k = std::clamp(int(slots.size()) - step, 0, int(slots.size()));

    int j = 0;
    int last_k_solved = -1;
    while (elapsed_seconds(start) < max_time && j <= vp.max_iterations) {
      bool improved = false;
      if (k < int(slots.size()) && k != last_k_solved) {
        // Fix the first k entries of J to the incumbent and search the rest.
        std::vector<std::pair<std::string, double>> fixes;
        fixes.reserve(size_t(k));
        for (int i = 0; i < k; ++i) {
          const FirstStageVar& fs = master.first_stage[size_t(slots[size_t(order[size_t(i)])])];
          fixes.emplace_back(master.model.variable(fs.var).name, design_slot_value(best, fs));
        }
        milp::MipModel sub = milp::fix_assignment(master.model, fixes);
        milp::SolveParams sp = params.mip;
        double remaining = max_time - elapsed_seconds(start);
        sp.time_limit_seconds = std::max(0.0, std::min(slice, remaining));
        sp.cutoff = best_perturbed - 1e-9 * std::max(1.0, std::abs(best_perturbed));
        sp.record_trace = false;
        milp::MipSolution sol = milp::solve_mip(sub, sp);
        ++report.master_solves;
        last_k_solved = k;
        push_event(report, params.record_trace, "vns_solve", ++step_counter,
                   sol.has_solution() ? sol.objective_value : 0.0, -1, k, best_cost);
        if (sol.has_solution() && sol.objective_value < best_perturbed - 1e-12) {
          best = extract_design(instance, master, sol.assignment);
          best_cost = design_cost(instance, best);
          best_perturbed = perturbed_design_value(master, best);
          improved = true;
        }
      }
      if (improved) {
        restart = false;
        restarts = 0;
        push_event(report, params.record_trace, "vns_improve", ++step_counter, best_cost, -1, k,
                   best_cost);
        break;
      }
      ++j;
      k = std::max(k - step / 2, 0);
      if (j > vp.max_iterations) restart = true;
    }
  }

  report.design = best;
  report.objective = best_cost;
  double rem = params.mip.time_limit_seconds - elapsed_seconds(start);
  report.per_scenario = evaluate_with_cycles(instance, scenarios, best, cycles,
                                             sliced(params.mip, std::max(rem, 1.0)),
                                             &report.pricing_solves);
  report.status =
      max_l(report.per_scenario) <= kInfeasibilityTolerance ? ReportStatus::Feasible
                                                            : ReportStatus::Infeasible;
  report.wall_time_seconds = elapsed_seconds(start);
  return report;
}

SolveReport solve_sbvnds(const NetworkInstance& instance, const ScenarioSet& scenarios,
                         const AlgorithmParams& params) {
  const auto start = Clock::now();
  SolveReport report;
  report.algorithm = "sbvnds";

  if (scenarios.size() == 0) {
    SolveReport base = solve_extensive(instance, scenarios, params);
    base.algorithm = "sbvnds";
    return base;
  }

  CycleSet cycles = enumerate_cycles(instance);
  int first = std::clamp(params.initial_scenario, 0, int(scenarios.size()) - 1);
  std::vector<int> active{first};
  std::vector<char> in_active(scenarios.size(), 0);
  in_active[size_t(first)] = 1;

  int64_t iteration = 0;
  while (true) {
    ++iteration;
    double remaining = params.mip.time_limit_seconds - elapsed_seconds(start);
    if (remaining <= 0.0) {
      report.status = ReportStatus::TimeLimit;
      break;
    }

    ScenarioSet sub = subset_of(scenarios, active);
    AlgorithmParams inner = params;
    inner.record_trace = false;
    inner.mip = sliced(params.mip, remaining);

    SolveReport greedy = solve_greedy(instance, sub, inner);
    report.master_solves += greedy.master_solves;
    report.pricing_solves += greedy.pricing_solves;
    if (greedy.status == ReportStatus::Infeasible) {
      report.status = ReportStatus::Infeasible;
      report.wall_time_seconds = elapsed_seconds(start);
      return report;
    }
    if (greedy.status == ReportStatus::TimeLimit) {
      report.status = ReportStatus::TimeLimit;
      break;
    }

    remaining = params.mip.time_limit_seconds - elapsed_seconds(start);
    inner.mip = sliced(params.mip, std::max(remaining, 0.0));
    SolveReport vns = solve_vns(instance, sub, greedy.design, inner);
    report.master_solves += vns.master_solves;
    report.pricing_solves += vns.pricing_solves;

    const Design& design = vns.objective <= greedy.objective ? vns.design : greedy.design;
    report.design = design;
    report.objective = design_cost(instance, design);
    push_event(report, params.record_trace, "sbvnds_master", iteration, double(active.size()), -1,
               -1, report.objective);

    int worst_id = -1;
    double worst_l = 0.0;
    for (int s = 0; s < int(scenarios.size()); ++s) {
      if (in_active[size_t(s)]) continue;
      double rem = params.mip.time_limit_seconds - elapsed_seconds(start);
      PricingResult pr = solve_pricing(instance, scenarios.scenarios[size_t(s)], report.design,
                                       cycles, sliced(params.mip, std::max(rem, 1.0)));
      ++report.pricing_solves;
      push_event(report, params.record_trace, "sbvnds_price", iteration, pr.l_value, s);
      if (pr.l_value > worst_l + 1e-12) {
        worst_l = pr.l_value;
        worst_id = s;
      }
    }

    if (worst_id < 0 || worst_l <= kInfeasibilityTolerance) {
      report.status = ReportStatus::Feasible;
      break;
    }
    active.push_back(worst_id);
    std::sort(active.begin(), active.end());
    in_active[size_t(worst_id)] = 1;
    push_event(report, params.record_trace, "sbvnds_add", iteration, worst_l, worst_id);
  }

  if (!report.design.line_built.empty()) {
    double rem = params.mip.time_limit_seconds - elapsed_seconds(start);
    report.per_scenario = evaluate_with_cycles(instance, scenarios, report.design, cycles,
                                               sliced(params.mip, std::max(rem, 1.0)),
                                               &report.pricing_solves);
  }
  report.wall_time_seconds = elapsed_seconds(start);
  return report;
}

std::vector<PricingResult> evaluate_design(const NetworkInstance& instance,
                                           const ScenarioSet& scenarios, const Design& design,
                                           const milp::SolveParams& mip) {
  CycleSet cycles = enumerate_cycles(instance);
  return evaluate_with_cycles(instance, scenarios, design, cycles, mip, nullptr);
}

SolveReport solve_with_algorithm(const std::string& name, const NetworkInstance& instance,
                                 const ScenarioSet& scenarios, const AlgorithmParams& params) {
  if (params.epsilon && name != "extensive")
    throw Error("chance constraints (epsilon) are only supported by the extensive solve");
  if (name == "extensive") return solve_extensive(instance, scenarios, params);
  if (name == "sbd") return solve_sbd(instance, scenarios, params);
  if (name == "greedy") return solve_greedy(instance, scenarios, params);
  if (name == "sbvnds") return solve_sbvnds(instance, scenarios, params);
  if (name == "vns") {
    SolveReport greedy = solve_greedy(instance, scenarios, params);
    if (greedy.status != ReportStatus::Feasible) return greedy;
    SolveReport vns = solve_vns(instance, scenarios, greedy.design, params);
    vns.master_solves += greedy.master_solves;
    vns.pricing_solves += greedy.pricing_solves;
    return vns;
  }
  throw Error("unknown algorithm: " + name);
}

SolveReport brute_force_oracle(const NetworkInstance& instance, const ScenarioSet& scenarios,
                               int max_binaries, const milp::SolveParams& mip) {
  const auto start = Clock::now();
  SolveReport report;
  report.algorithm = "brute_force_oracle";

  CycleSet cycles = enumerate_cycles(instance);
  MasterModel master = build_master(instance, scenarios, cycles);

  std::vector<int> binary_slots;
  std::vector<int> capacity_slots;
  for (int slot : master.decision_slots) {
    if (master.first_stage[size_t(slot)].kind == FirstStageKind::NewCapacity)
      capacity_slots.push_back(slot);
    else
      binary_slots.push_back(slot);
  }
  const int k = int(binary_slots.size());
  if (k > max_binaries || k >= 31)
    throw TooLarge("brute-force oracle limited to " + std::to_string(std::min(max_binaries, 30)) +
                   " first-stage binaries, instance has " + std::to_string(k));

  // Scenario-relevant projection of an assignment: line and facility bits
  // always matter, hardening only on edges the scenario damages, switches
  // never (opening a switch cannot increase service).
  std::vector<std::vector<int>> relevant_bits(scenarios.size());
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (int i = 0; i < k; ++i) {
      const FirstStageVar& fs = master.first_stage[size_t(binary_slots[size_t(i)])];
      bool relevant = false;
      if (fs.kind == FirstStageKind::LineBuilt || fs.kind == FirstStageKind::FacilityBuilt)
        relevant = true;
      else if (fs.kind == FirstStageKind::Hardened)
        relevant = scenarios.scenarios[s].damages(instance.edges[size_t(fs.edge)].id);
      if (relevant) relevant_bits[s].push_back(i);
    }
  }
  std::vector<std::unordered_map<uint32_t, bool>> memo(scenarios.size());

  auto design_for_mask = [&](uint32_t mask, bool max_capacities) {
    Design d = Design::empty_for(instance);
    for (int i = 0; i < k; ++i) {
      const FirstStageVar& fs = master.first_stage[size_t(binary_slots[size_t(i)])];
      bool on = (mask >> i) & 1u;
      if (!on) continue;
      switch (fs.kind) {
        case FirstStageKind::LineBuilt: d.line_built[size_t(fs.edge)] = 1; break;
        case FirstStageKind::SwitchBuilt: d.switch_built[size_t(fs.edge)] = 1; break;
        case FirstStageKind::Hardened: d.hardened[size_t(fs.edge)] = 1; break;
        case FirstStageKind::FacilityBuilt: d.facility_built[size_t(fs.bus)] = 1; break;
        case FirstStageKind::NewCapacity: break;
      }
    }
    if (max_capacities) {
      for (int slot : capacity_slots) {
        const FirstStageVar& fs = master.first_stage[size_t(slot)];
        if (d.facility_built[size_t(fs.bus)])
          d.new_capacity[size_t(fs.bus)][size_t(fs.phase)] = fs.capacity_cap;
      }
    }
    return d;
  };

  // Enumerate assignments in cost order, lexicographic (variable 0 most
  // significant) on ties, pruning once the binary cost alone cannot beat the
  // incumbent.
  struct Entry {
    double cost;
    uint64_t lex_key;
    uint32_t mask;
  };
  std::vector<Entry> entries;
  entries.reserve(size_t(1) << k);
  for (uint32_t mask = 0; mask < (uint32_t(1) << k); ++mask) {
    double cost = 0.0;
    uint64_t key = 0;
    for (int i = 0; i < k; ++i) {
      if ((mask >> i) & 1u) {
        cost += master.first_stage[size_t(binary_slots[size_t(i)])].cost;
        key |= uint64_t(1) << (k - 1 - i);
      }
    }
    entries.push_back({cost, key, mask});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.lex_key < b.lex_key;
  });

  double best_cost = milp::kInfinity;
  Design best_design;
  bool found = false;

  for (const Entry& entry : entries) {
    if (entry.cost >= best_cost - 1e-12) break;
    if (elapsed_seconds(start) > mip.time_limit_seconds) break;

    Design screen = design_for_mask(entry.mask, true);
    bool all_feasible = true;
    for (std::size_t s = 0; s < scenarios.size() && all_feasible; ++s) {
      uint32_t key = 0;
      for (std::size_t r = 0; r < relevant_bits[s].size(); ++r)
        if ((entry.mask >> relevant_bits[s][r]) & 1u) key |= uint32_t(1) << r;
      auto it = memo[s].find(key);
      bool feasible;
      if (it != memo[s].end()) {
        feasible = it->second;
      } else {
        PricingResult pr =
            solve_pricing(instance, scenarios.scenarios[s], screen, cycles, mip);
        ++report.pricing_solves;
        feasible = pr.l_value <= kInfeasibilityTolerance;
        memo[s].emplace(key, feasible);
      }
      all_feasible = feasible;
    }
    if (!all_feasible) continue;

    double total;
    Design candidate;
    if (capacity_slots.empty()) {
      candidate = design_for_mask(entry.mask, false);
      total = entry.cost;
    } else {
      // Optimize the shared continuous capacities with the binaries pinned.
      std::vector<std::pair<std::string, double>> fixes;
      for (int i = 0; i < k; ++i) {
        const FirstStageVar& fs = master.first_stage[size_t(binary_slots[size_t(i)])];
        fixes.emplace_back(master.model.variable(fs.var).name, double((entry.mask >> i) & 1u));
      }
      milp::MipModel sub = milp::fix_assignment(master.model, fixes);
      milp::MipSolution sol = milp::solve_mip(sub, mip);
      ++report.master_solves;
      if (!sol.has_solution()) continue;  // screening said feasible; stay safe
      candidate = extract_design(instance, master, sol.assignment);
      total = design_cost(instance, candidate);
    }
    if (total < best_cost - 1e-12) {
      best_cost = total;
      best_design = candidate;
      found = true;
    }
  }

  if (!found) {
    report.status = ReportStatus::Infeasible;
    report.wall_time_seconds = elapsed_seconds(start);
    return report;
  }
  report.status = ReportStatus::Optimal;
  report.design = best_design;
  report.objective = best_cost;
  report.bound = best_cost;
  report.per_scenario =
      evaluate_with_cycles(instance, scenarios, best_design, cycles, mip, &report.pricing_solves);
  report.wall_time_seconds = elapsed_seconds(start);
  return report;
}

}  // namespace gridforge
