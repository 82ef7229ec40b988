#include "gridforge/formulation.hpp"

#include <algorithm>
#include <cmath>

#include "gridforge/errors.hpp"

namespace gridforge {

namespace {

using milp::MipModel;
using milp::Relation;
using milp::Sense;
using milp::VarType;

std::string phase_suffix(Phase p) { return std::string(1, phase_char(p)); }

double round_binary(double v) { return v >= 0.5 ? 1.0 : 0.0; }

struct BlockOptions {
  bool include_service_rows = true;
  const Design* fixed_design = nullptr;  // cap use variables by design values
  bool energize_lines = false;           // pin line_used to the live pattern
  bool free_switch_open = false;         // leave switch_open unbounded by the design
};

struct ServiceTerms {
  std::vector<milp::LinearTerm> critical;      // served vars at critical buses
  std::vector<milp::LinearTerm> non_critical;  // served vars elsewhere
  double critical_demand = 0.0;
  double non_critical_demand = 0.0;
};

// Emits the feasible-network block of one scenario into `model` and returns
// the variable map plus the served-load sums the service rows need.
ScenarioVars append_scenario_block(MipModel& model, const NetworkInstance& instance,
                                   const InstanceIndex& index, const Scenario& scenario,
                                   const CycleSet& cycles, double lambda, double gamma,
                                   const BlockOptions& opt, ServiceTerms* out_terms) {
  const int num_edges = int(instance.edges.size());
  const int num_buses = int(instance.buses.size());
  const std::string sp = "s" + std::to_string(scenario.id) + "_";

  ScenarioVars vars;
  vars.scenario_id = scenario.id;
  vars.line_used.assign(size_t(num_edges), -1);
  vars.switch_open.assign(size_t(num_edges), -1);
  vars.harden_used.assign(size_t(num_edges), -1);
  vars.direction_neg.assign(size_t(num_edges), -1);
  vars.direction_pos.assign(size_t(num_edges), -1);
  vars.flow.assign(size_t(num_edges), {-1, -1, -1});
  vars.facility_used.assign(size_t(num_buses), -1);
  vars.capacity_used.assign(size_t(num_buses), {-1, -1, -1});
  vars.generation.assign(size_t(num_buses), {-1, -1, -1});
  vars.served_load.assign(size_t(num_buses), {-1, -1, -1});
  vars.block_served.assign(size_t(num_buses), {});
  vars.cycle_line.assign(cycles.reduced_edges.size(), -1);
  vars.cycle_switch.assign(cycles.reduced_edges.size(), -1);

  const Design* design = opt.fixed_design;

  // Radial operation bounds every edge flow by the total demand on its
  // phase, which is usually far tighter than the line rating.
  PerPhase phase_demand = zero_phases();
  for (const Bus& bus : instance.buses)
    for (Phase p : kAllPhases)
      phase_demand[static_cast<int>(p)] += bus.total_demand(p);
  auto effective_capacity = [&](const Edge& edge, int k) {
    return std::min(edge.capacity[size_t(k)], phase_demand[size_t(k)]);
  };

  // Edge variables.
  for (int e = 0; e < num_edges; ++e) {
    const Edge& edge = instance.edges[size_t(e)];
    const std::string es = "e" + std::to_string(e);
    const bool damaged = scenario.damages(edge.id);
    const bool hard_damaged = scenario.damages_hardened(edge.id);

    double use_ub = 1.0;
    if (design && !design->line_built[size_t(e)]) use_ub = 0.0;
    double use_lb = 0.0;
    if (opt.energize_lines) {
      // Live pattern: built and undamaged, or built, hardened and not
      // hardened-damaged.
      bool built = !design || design->line_built[size_t(e)];
      bool hardened = design && edge.hardenable && design->hardened[size_t(e)];
      bool live = built && (!damaged || (hardened && !hard_damaged));
      use_lb = use_ub = live ? 1.0 : 0.0;
    }
    vars.line_used[size_t(e)] = model.add_variable(sp + "use_" + es, use_lb, use_ub, VarType::Binary);
    model.set_branching_priority(vars.line_used[size_t(e)], 3);

    double open_ub = 1.0;
    if (design && !opt.free_switch_open && !design->switch_built[size_t(e)]) open_ub = 0.0;
    vars.switch_open[size_t(e)] = model.add_variable(sp + "open_" + es, 0.0, open_ub, VarType::Binary);
    model.set_branching_priority(vars.switch_open[size_t(e)], 3);

    if (edge.hardenable) {
      double huse_lb = 0.0;
      double huse_ub = design ? double(design->hardened[size_t(e)]) : 1.0;
      if (opt.energize_lines && damaged) {
        // Consistent with the damage equality below once lines are pinned.
        huse_lb = huse_ub = use_lb;
      }
      vars.harden_used[size_t(e)] =
          model.add_variable(sp + "huse_" + es, huse_lb, huse_ub, VarType::Binary);
      model.set_branching_priority(vars.harden_used[size_t(e)], 3);
    }

    // Direction flags gate the per-direction imbalance bands, so they must
    // stay binary on multi-phase edges; single-phase edges only use them as
    // flow caps, where the continuous relaxation is equivalent (they are not
    // in the model's integrality list either).
    if (edge.phases.size() >= 2) {
      vars.direction_neg[size_t(e)] = model.add_binary(sp + "dirn_" + es);
      vars.direction_pos[size_t(e)] = model.add_binary(sp + "dirp_" + es);
    } else {
      vars.direction_neg[size_t(e)] = model.add_continuous(sp + "dirn_" + es, 0.0, 1.0);
      vars.direction_pos[size_t(e)] = model.add_continuous(sp + "dirp_" + es, 0.0, 1.0);
    }

    for (Phase p : kAllPhases) {
      if (!edge.phases.contains(p)) continue;
      double u = effective_capacity(edge, static_cast<int>(p));
      vars.flow[size_t(e)][static_cast<int>(p)] =
          model.add_continuous(sp + "flow_" + es + phase_suffix(p), -u, u);
    }
  }

  // Bus variables.
  for (int b = 0; b < num_buses; ++b) {
    const Bus& bus = instance.buses[size_t(b)];
    const std::string bs = "b" + std::to_string(b);

    if (bus.generation) {
      const GenerationSite& site = *bus.generation;
      double max_new_total = phase_sum(site.max_new_capacity);
      if (max_new_total > 0.0) {
        double fuse_ub = design ? double(design->facility_built[size_t(b)]) : 1.0;
        vars.facility_used[size_t(b)] =
            model.add_variable(sp + "fuse_" + bs, 0.0, fuse_ub, VarType::Binary);
        model.set_branching_priority(vars.facility_used[size_t(b)], 3);
      }
      for (Phase p : kAllPhases) {
        if (!bus.phases.contains(p)) continue;
        int k = static_cast<int>(p);
        double cap_m = site.max_new_capacity[k];
        if (cap_m > 0.0) {
          double cuse_ub = design ? design->new_capacity[size_t(b)][k] : cap_m;
          vars.capacity_used[size_t(b)][k] =
              model.add_continuous(sp + "cuse_" + bs + phase_suffix(p), 0.0, cuse_ub);
        }
        double gen_ub = site.existing_capacity[k] + cap_m;
        if (gen_ub > 0.0)
          vars.generation[size_t(b)][k] =
              model.add_continuous(sp + "gen_" + bs + phase_suffix(p), 0.0, gen_ub);
      }
    }

    if (!bus.load_blocks.empty()) {
      for (Phase p : kAllPhases) {
        if (!bus.phases.contains(p)) continue;
        double total = bus.total_demand(p);
        vars.served_load[size_t(b)][static_cast<int>(p)] =
            model.add_continuous(sp + "load_" + bs + phase_suffix(p), 0.0, total);
      }
      for (int j = 0; j < int(bus.load_blocks.size()); ++j) {
        int blk = model.add_binary(sp + "blk_" + bs + "_" + std::to_string(j));
        model.set_branching_priority(blk, 2);
        vars.block_served[size_t(b)].push_back(blk);
      }
    }
  }

  // Cycle bookkeeping variables, one pair per reduced edge. With binary line
  // and switch variables their integral optima are always attainable, so the
  // continuous range suffices (they are also absent from the integrality
  // list).
  for (int r = 0; r < int(cycles.reduced_edges.size()); ++r) {
    vars.cycle_line[size_t(r)] = model.add_continuous(sp + "cl_r" + std::to_string(r), 0.0, 1.0);
    vars.cycle_switch[size_t(r)] = model.add_continuous(sp + "cs_r" + std::to_string(r), 0.0, 1.0);
  }

  // Per-edge constraints: capacity, direction, switch, imbalance, damage.
  for (int e = 0; e < num_edges; ++e) {
    const Edge& edge = instance.edges[size_t(e)];
    const std::string es = "e" + std::to_string(e);
    int use = vars.line_used[size_t(e)];
    int open = vars.switch_open[size_t(e)];
    int dirn = vars.direction_neg[size_t(e)];
    int dirp = vars.direction_pos[size_t(e)];

    double u_max = 0.0;
    for (Phase p : kAllPhases) {
      if (!edge.phases.contains(p)) continue;
      int k = static_cast<int>(p);
      double u = effective_capacity(edge, k);
      u_max = std::max(u_max, u);
      int f = vars.flow[size_t(e)][k];
      // Flow fits the capacity in the chosen direction.
      model.add_constraint(sp + "capn_" + es + phase_suffix(p),
                           {{f, 1.0}, {dirn, u}}, Relation::GreaterEqual, 0.0);
      model.add_constraint(sp + "capp_" + es + phase_suffix(p),
                           {{f, 1.0}, {dirp, -u}}, Relation::LessEqual, 0.0);
      // An open switch blocks the line.
      model.add_constraint(sp + "swlo_" + es + phase_suffix(p),
                           {{f, 1.0}, {open, -u}}, Relation::GreaterEqual, -u);
      model.add_constraint(sp + "swhi_" + es + phase_suffix(p),
                           {{f, 1.0}, {open, u}}, Relation::LessEqual, u);
    }

    // All phases flow the same way, and only on a used line.
    model.add_constraint(sp + "dir_" + es, {{dirn, 1.0}, {dirp, 1.0}, {use, -1.0}},
                         Relation::LessEqual, 0.0);

    // Phase imbalance band around the per-phase average, gated per direction.
    if (edge.phases.size() >= 2) {
      double beta = edge.phase_imbalance_limit;
      double n = double(edge.phases.size());
      double a = (1.0 - beta) / n;
      double bq = (1.0 + beta) / n;
      double big_m = (2.0 + beta) * u_max;
      for (Phase p : kAllPhases) {
        if (!edge.phases.contains(p)) continue;
        int f = vars.flow[size_t(e)][static_cast<int>(p)];
        std::vector<milp::LinearTerm> lo_terms{{f, 1.0}, {dirp, -big_m}};
        std::vector<milp::LinearTerm> hi_terms{{f, 1.0}, {dirp, big_m}};
        std::vector<milp::LinearTerm> rlo_terms{{f, -1.0}, {dirn, -big_m}};
        std::vector<milp::LinearTerm> rhi_terms{{f, -1.0}, {dirn, big_m}};
        for (Phase p2 : kAllPhases) {
          if (!edge.phases.contains(p2)) continue;
          int f2 = vars.flow[size_t(e)][static_cast<int>(p2)];
          lo_terms.push_back({f2, -a});
          hi_terms.push_back({f2, -bq});
          rlo_terms.push_back({f2, a});
          rhi_terms.push_back({f2, bq});
        }
        model.add_constraint(sp + "ballo_" + es + phase_suffix(p), lo_terms,
                             Relation::GreaterEqual, -big_m);
        model.add_constraint(sp + "balhi_" + es + phase_suffix(p), hi_terms,
                             Relation::LessEqual, big_m);
        model.add_constraint(sp + "rballo_" + es + phase_suffix(p), rlo_terms,
                             Relation::GreaterEqual, -big_m);
        model.add_constraint(sp + "rbalhi_" + es + phase_suffix(p), rhi_terms,
                             Relation::LessEqual, big_m);
      }
    }

    // Damage: a damaged line operates only when hardened, never when the
    // hardened version is damaged too.
    if (scenario.damages(edge.id)) {
      int huse = vars.harden_used[size_t(e)];
      if (huse >= 0) {
        model.add_constraint(sp + "dmg_" + es, {{use, 1.0}, {huse, -1.0}}, Relation::Equal, 0.0);
        if (scenario.damages_hardened(edge.id))
          model.add_constraint(sp + "hdmg_" + es, {{huse, 1.0}}, Relation::Equal, 0.0);
      } else {
        model.add_constraint(sp + "dmg0_" + es, {{use, 1.0}}, Relation::Equal, 0.0);
      }
    }

    // A switch can only be open on a used line.
    model.add_constraint(sp + "sw_" + es, {{open, 1.0}, {use, -1.0}}, Relation::LessEqual, 0.0);
  }

  // Load service and generation rows per bus.
  ServiceTerms terms;
  for (int b = 0; b < num_buses; ++b) {
    const Bus& bus = instance.buses[size_t(b)];
    const std::string bs = "b" + std::to_string(b);
    for (Phase p : kAllPhases) {
      if (!bus.phases.contains(p)) continue;
      int k = static_cast<int>(p);

      if (!bus.load_blocks.empty()) {
        // All or none of each block is served.
        std::vector<milp::LinearTerm> serve{{vars.served_load[size_t(b)][k], 1.0}};
        for (int j = 0; j < int(bus.load_blocks.size()); ++j) {
          double d = bus.load_blocks[size_t(j)].demand[k];
          if (d != 0.0) serve.push_back({vars.block_served[size_t(b)][size_t(j)], -d});
        }
        model.add_constraint(sp + "serve_" + bs + phase_suffix(p), serve, Relation::Equal, 0.0);

        double demand = bus.total_demand(p);
        milp::LinearTerm served_term{vars.served_load[size_t(b)][k], 1.0};
        if (bus.is_critical) {
          terms.critical.push_back(served_term);
          terms.critical_demand += demand;
        } else {
          terms.non_critical.push_back(served_term);
          terms.non_critical_demand += demand;
        }
      }

      if (bus.generation) {
        const GenerationSite& site = *bus.generation;
        int gen = vars.generation[size_t(b)][k];
        int cuse = vars.capacity_used[size_t(b)][k];
        if (gen >= 0 && cuse >= 0)
          model.add_constraint(sp + "gcap_" + bs + phase_suffix(p),
                               {{gen, 1.0}, {cuse, -1.0}}, Relation::LessEqual,
                               site.existing_capacity[k]);
        int fuse = vars.facility_used[size_t(b)];
        if (cuse >= 0 && fuse >= 0)
          model.add_constraint(sp + "ccap_" + bs + phase_suffix(p),
                               {{cuse, 1.0}, {fuse, -site.max_new_capacity[k]}},
                               Relation::LessEqual, 0.0);
      }

      // Flow balance: generation - served - outgoing + incoming = 0.
      std::vector<milp::LinearTerm> balance;
      if (vars.generation[size_t(b)][k] >= 0) balance.push_back({vars.generation[size_t(b)][k], 1.0});
      if (vars.served_load[size_t(b)][k] >= 0) balance.push_back({vars.served_load[size_t(b)][k], -1.0});
      for (int e = 0; e < num_edges; ++e) {
        int f = vars.flow[size_t(e)][k];
        if (f < 0) continue;
        const Edge& edge = instance.edges[size_t(e)];
        if (index.bus.at(edge.from) == b) balance.push_back({f, -1.0});
        else if (index.bus.at(edge.to) == b) balance.push_back({f, 1.0});
      }
      if (!balance.empty())
        model.add_constraint(sp + "bal_" + bs + phase_suffix(p), balance, Relation::Equal, 0.0);
    }
  }

  // Radiality: enumerated cycles over the reduced graph, linked to the
  // per-edge variables, plus the pairwise rule for parallel edges.
  for (int c = 0; c < int(cycles.cycles.size()); ++c) {
    std::vector<milp::LinearTerm> cyc;
    for (int r : cycles.cycles[size_t(c)]) {
      cyc.push_back({vars.cycle_line[size_t(r)], 1.0});
      cyc.push_back({vars.cycle_switch[size_t(r)], -1.0});
    }
    model.add_constraint(sp + "cyc_c" + std::to_string(c), cyc, Relation::LessEqual,
                         double(cycles.cycles[size_t(c)].size()) - 1.0);
  }
  for (int r = 0; r < int(cycles.reduced_edges.size()); ++r) {
    const ReducedEdge& re = cycles.reduced_edges[size_t(r)];
    int cl = vars.cycle_line[size_t(r)];
    int cs = vars.cycle_switch[size_t(r)];
    for (int e : re.edge_indices) {
      const std::string es = "e" + std::to_string(e);
      int use = vars.line_used[size_t(e)];
      int open = vars.switch_open[size_t(e)];
      model.add_constraint(sp + "clink_" + es, {{use, 1.0}, {cl, -1.0}}, Relation::LessEqual, 0.0);
      model.add_constraint(sp + "swlink1_" + es, {{open, 1.0}, {use, 1.0}, {cs, 1.0}},
                           Relation::LessEqual, 3.0);
      model.add_constraint(sp + "swlink2_" + es, {{open, 1.0}, {use, -1.0}, {cs, -1.0}},
                           Relation::GreaterEqual, -1.0);
    }
    for (std::size_t i = 0; i < re.edge_indices.size(); ++i) {
      for (std::size_t j = i + 1; j < re.edge_indices.size(); ++j) {
        int e1 = re.edge_indices[i];
        int e2 = re.edge_indices[j];
        model.add_constraint(
            sp + "par_r" + std::to_string(r) + "_" + std::to_string(e1) + "_" + std::to_string(e2),
            {{vars.line_used[size_t(e1)], 1.0},
             {vars.line_used[size_t(e2)], 1.0},
             {vars.switch_open[size_t(e1)], -1.0},
             {vars.switch_open[size_t(e2)], -1.0}},
            Relation::LessEqual, 1.0);
      }
    }
  }

  // Resilience criteria.
  if (opt.include_service_rows) {
    if (terms.critical_demand > 0.0)
      model.add_constraint(sp + "crit", terms.critical, Relation::GreaterEqual,
                           lambda * terms.critical_demand);
    if (terms.non_critical_demand > 0.0)
      model.add_constraint(sp + "tot", terms.non_critical, Relation::GreaterEqual,
                           gamma * terms.non_critical_demand);
  }

  if (out_terms) *out_terms = std::move(terms);
  return vars;
}

void require_valid(const NetworkInstance& instance) {
  ValidationReport report = validate_instance(instance);
  if (!report.ok())
    throw Error("invalid instance: " + report.issues.front().subject + ": " +
                report.issues.front().message);
}

}  // namespace

Design Design::empty_for(const NetworkInstance& instance) {
  Design d;
  d.line_built.reserve(instance.edges.size());
  d.switch_built.reserve(instance.edges.size());
  d.hardened.assign(instance.edges.size(), 0);
  for (const Edge& e : instance.edges) {
    d.line_built.push_back(e.exists ? 1 : 0);
    d.switch_built.push_back(e.has_existing_switch ? 1 : 0);
  }
  d.facility_built.assign(instance.buses.size(), 0);
  d.new_capacity.assign(instance.buses.size(), zero_phases());
  return d;
}

double design_cost(const NetworkInstance& instance, const Design& design) {
  double cost = 0.0;
  for (std::size_t e = 0; e < instance.edges.size(); ++e) {
    const Edge& edge = instance.edges[e];
    if (design.line_built[e] && !edge.exists) cost += edge.build_cost;
    if (design.switch_built[e] && !edge.has_existing_switch) cost += edge.switch_cost;
    if (design.hardened[e]) cost += edge.harden_cost;
  }
  for (std::size_t b = 0; b < instance.buses.size(); ++b) {
    const Bus& bus = instance.buses[b];
    if (!bus.generation) continue;
    if (design.facility_built[b]) cost += bus.generation->facility_cost;
    for (int k = 0; k < kNumPhases; ++k)
      cost += design.new_capacity[b][size_t(k)] * bus.generation->capacity_cost[size_t(k)];
  }
  return cost;
}

std::vector<std::string> validate_design(const NetworkInstance& instance, const Design& design) {
  std::vector<std::string> issues;
  if (design.line_built.size() != instance.edges.size() ||
      design.switch_built.size() != instance.edges.size() ||
      design.hardened.size() != instance.edges.size() ||
      design.facility_built.size() != instance.buses.size() ||
      design.new_capacity.size() != instance.buses.size()) {
    issues.push_back("design shape does not match the instance");
    return issues;
  }
  for (std::size_t e = 0; e < instance.edges.size(); ++e) {
    const Edge& edge = instance.edges[e];
    if (edge.exists && !design.line_built[e])
      issues.push_back("existing line " + edge.id + " cannot be unbuilt");
    if (edge.has_existing_switch && !design.switch_built[e])
      issues.push_back("existing switch on " + edge.id + " cannot be removed");
    if (design.switch_built[e] && !design.line_built[e])
      issues.push_back("switch on unbuilt line " + edge.id);
    if (design.hardened[e] && !edge.hardenable)
      issues.push_back("edge " + edge.id + " is not hardenable");
  }
  for (std::size_t b = 0; b < instance.buses.size(); ++b) {
    const Bus& bus = instance.buses[b];
    double max_total = bus.generation ? phase_sum(bus.generation->max_new_capacity) : 0.0;
    if (design.facility_built[b] && max_total <= 0.0)
      issues.push_back("facility at bus " + bus.id + " without buildable capacity");
    for (int k = 0; k < kNumPhases; ++k) {
      double cap = design.new_capacity[b][size_t(k)];
      if (cap < -1e-9) issues.push_back("negative capacity at bus " + bus.id);
      double limit = bus.generation && design.facility_built[b]
                         ? bus.generation->max_new_capacity[size_t(k)]
                         : 0.0;
      if (cap > limit + 1e-6)
        issues.push_back("capacity at bus " + bus.id + " exceeds the facility cap");
    }
  }
  return issues;
}

MasterModel build_master(const NetworkInstance& instance, const ScenarioSet& scenarios,
                         const CycleSet& cycles, const std::vector<int>& scenario_ids,
                         const MasterOptions& options) {
  require_valid(instance);
  InstanceIndex index = make_index(instance);

  MasterModel master;
  master.lambda = instance.critical_fraction;
  master.gamma = instance.total_fraction;
  MipModel& model = master.model;
  model.set_objective_sense(Sense::Minimize);

  const int num_edges = int(instance.edges.size());
  const int num_buses = int(instance.buses.size());
  master.line_slot.assign(size_t(num_edges), -1);
  master.switch_slot.assign(size_t(num_edges), -1);
  master.harden_slot.assign(size_t(num_edges), -1);
  master.facility_slot.assign(size_t(num_buses), -1);
  master.capacity_slot.assign(size_t(num_buses), {-1, -1, -1});

  auto add_slot = [&](FirstStageVar fs, int* slot_out) {
    int slot = int(master.first_stage.size());
    if (!fs.fixed) master.decision_slots.push_back(slot);
    master.first_stage.push_back(fs);
    *slot_out = slot;
  };

  // First-stage variables; pre-existing components enter fixed at 1 with zero
  // objective cost.
  for (int e = 0; e < num_edges; ++e) {
    const Edge& edge = instance.edges[size_t(e)];
    const std::string es = "e" + std::to_string(e);

    FirstStageVar line{FirstStageKind::LineBuilt, e, -1, -1, -1, edge.exists ? 0.0 : edge.build_cost,
                       edge.exists, 1.0, 0.0};
    line.var = edge.exists ? model.add_variable("fs_line_" + es, 1.0, 1.0, VarType::Binary)
                           : model.add_binary("fs_line_" + es);
    model.set_branching_priority(line.var, 4);
    add_slot(line, &master.line_slot[size_t(e)]);

    FirstStageVar sw{FirstStageKind::SwitchBuilt, e, -1, -1, -1,
                     edge.has_existing_switch ? 0.0 : edge.switch_cost, edge.has_existing_switch,
                     1.0, 0.0};
    sw.var = edge.has_existing_switch
                 ? model.add_variable("fs_switch_" + es, 1.0, 1.0, VarType::Binary)
                 : model.add_binary("fs_switch_" + es);
    model.set_branching_priority(sw.var, 4);
    add_slot(sw, &master.switch_slot[size_t(e)]);

    if (edge.hardenable) {
      FirstStageVar hd{FirstStageKind::Hardened, e, -1, -1, -1, edge.harden_cost, false, 0.0, 0.0};
      hd.var = model.add_binary("fs_harden_" + es);
      model.set_branching_priority(hd.var, 4);
      add_slot(hd, &master.harden_slot[size_t(e)]);
    }
  }
  for (int b = 0; b < num_buses; ++b) {
    const Bus& bus = instance.buses[size_t(b)];
    if (!bus.generation) continue;
    const GenerationSite& site = *bus.generation;
    if (phase_sum(site.max_new_capacity) <= 0.0) continue;
    const std::string bs = "b" + std::to_string(b);

    FirstStageVar fac{FirstStageKind::FacilityBuilt, -1, b, -1, -1, site.facility_cost, false, 0.0,
                      0.0};
    fac.var = model.add_binary("fs_fac_" + bs);
    model.set_branching_priority(fac.var, 4);
    add_slot(fac, &master.facility_slot[size_t(b)]);

    for (Phase p : kAllPhases) {
      if (!bus.phases.contains(p)) continue;
      int k = static_cast<int>(p);
      double cap_m = site.max_new_capacity[k];
      if (cap_m <= 0.0) continue;
      FirstStageVar cap{FirstStageKind::NewCapacity, -1, b, k, -1, site.capacity_cost[size_t(k)],
                        false, 0.0, cap_m};
      cap.var = model.add_continuous("fs_cap_" + bs + phase_suffix(p), 0.0, cap_m);
      add_slot(cap, &master.capacity_slot[size_t(b)][size_t(k)]);
    }
  }

  // Objective: true catalog costs plus, optionally, a tiny index-scaled
  // surcharge so equal-cost optima resolve deterministically toward low
  // indices. Reported objectives are recomputed from true costs.
  double max_cost = 1.0;
  for (const FirstStageVar& fs : master.first_stage) max_cost = std::max(max_cost, fs.cost);
  double eps_unit =
      options.perturb_ties ? max_cost * 1e-10 / double(master.decision_slots.size() + 1) : 0.0;
  for (std::size_t pos = 0; pos < master.decision_slots.size(); ++pos) {
    const FirstStageVar& fs = master.first_stage[size_t(master.decision_slots[pos])];
    model.set_objective_coeff(fs.var, fs.cost + eps_unit * double(pos + 1));
  }

  // Capacity big-M rows (first stage only).
  for (int b = 0; b < num_buses; ++b) {
    int fac_slot = master.facility_slot[size_t(b)];
    if (fac_slot < 0) continue;
    for (int k = 0; k < kNumPhases; ++k) {
      int cap_slot = master.capacity_slot[size_t(b)][size_t(k)];
      if (cap_slot < 0) continue;
      const FirstStageVar& cap = master.first_stage[size_t(cap_slot)];
      const FirstStageVar& fac = master.first_stage[size_t(fac_slot)];
      model.add_constraint("capm_b" + std::to_string(b) + phase_suffix(Phase(k)),
                           {{cap.var, 1.0}, {fac.var, -cap.capacity_cap}}, Relation::LessEqual,
                           0.0);
    }
  }

  // Scenario blocks plus linking rows.
  std::vector<int> ids = scenario_ids;
  if (ids.empty())
    for (int s = 0; s < int(scenarios.size()); ++s) ids.push_back(s);
  master.scenario_ids = ids;

  for (int sid : ids) {
    const Scenario& scenario = scenarios.scenarios.at(size_t(sid));
    BlockOptions opt;
    ScenarioVars vars = append_scenario_block(model, instance, index, scenario, cycles,
                                              master.lambda, master.gamma, opt, nullptr);
    const std::string lp = "lnk_s" + std::to_string(scenario.id) + "_";
    for (int e = 0; e < num_edges; ++e) {
      const std::string es = "e" + std::to_string(e);
      model.add_constraint(lp + "use_" + es,
                           {{vars.line_used[size_t(e)], 1.0},
                            {master.first_stage[size_t(master.line_slot[size_t(e)])].var, -1.0}},
                           Relation::LessEqual, 0.0);
      model.add_constraint(lp + "open_" + es,
                           {{vars.switch_open[size_t(e)], 1.0},
                            {master.first_stage[size_t(master.switch_slot[size_t(e)])].var, -1.0}},
                           Relation::LessEqual, 0.0);
      if (master.harden_slot[size_t(e)] >= 0)
        model.add_constraint(
            lp + "huse_" + es,
            {{vars.harden_used[size_t(e)], 1.0},
             {master.first_stage[size_t(master.harden_slot[size_t(e)])].var, -1.0}},
            Relation::LessEqual, 0.0);
    }
    for (int b = 0; b < num_buses; ++b) {
      const std::string bs = "b" + std::to_string(b);
      if (vars.facility_used[size_t(b)] >= 0 && master.facility_slot[size_t(b)] >= 0)
        model.add_constraint(
            lp + "fuse_" + bs,
            {{vars.facility_used[size_t(b)], 1.0},
             {master.first_stage[size_t(master.facility_slot[size_t(b)])].var, -1.0}},
            Relation::LessEqual, 0.0);
      for (int k = 0; k < kNumPhases; ++k) {
        if (vars.capacity_used[size_t(b)][size_t(k)] < 0) continue;
        int cap_slot = master.capacity_slot[size_t(b)][size_t(k)];
        if (cap_slot < 0) continue;
        model.add_constraint(lp + "cuse_" + bs + phase_suffix(Phase(k)),
                             {{vars.capacity_used[size_t(b)][size_t(k)], 1.0},
                              {master.first_stage[size_t(cap_slot)].var, -1.0}},
                             Relation::LessEqual, 0.0);
      }
    }
    master.scenarios.push_back(std::move(vars));
  }

  return master;
}

void apply_chance_relaxation(MasterModel& master, double epsilon) {
  if (master.epsilon) throw Error("master is already chance-relaxed");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error("epsilon must lie in [0, 1]");
  std::vector<milp::LinearTerm> budget;
  for (ScenarioVars& vars : master.scenarios) {
    const std::string sp = "s" + std::to_string(vars.scenario_id) + "_";
    vars.chance_var = master.model.add_binary(sp + "z");
    for (const char* row_name : {"crit", "tot"}) {
      int row = master.model.find_constraint(sp + row_name);
      if (row < 0) continue;  // no demand of that class
      double rhs = master.model.constraint(row).rhs;
      // served >= rhs * (1 - z)  <=>  served + rhs * z >= rhs
      master.model.add_term_to_constraint(row, vars.chance_var, rhs);
    }
    budget.push_back({vars.chance_var, 1.0});
  }
  master.chance_budget_row = master.model.add_constraint(
      "chance_budget", budget, Relation::LessEqual, epsilon * double(master.scenarios.size()));
  master.epsilon = epsilon;
}

ScenarioBlockModel build_scenario_block(const NetworkInstance& instance, const Scenario& scenario,
                                        const CycleSet& cycles) {
  require_valid(instance);
  InstanceIndex index = make_index(instance);
  ScenarioBlockModel block;
  BlockOptions opt;
  block.vars = append_scenario_block(block.model, instance, index, scenario, cycles,
                                     instance.critical_fraction, instance.total_fraction, opt,
                                     nullptr);
  return block;
}

PricingModel build_pricing_model(const NetworkInstance& instance, const Scenario& scenario,
                                 const Design& design, const CycleSet& cycles) {
  require_valid(instance);
  std::vector<std::string> issues = validate_design(instance, design);
  if (!issues.empty()) throw Error("invalid design: " + issues.front());

  InstanceIndex index = make_index(instance);
  PricingModel pricing;
  pricing.lambda = instance.critical_fraction;
  pricing.gamma = instance.total_fraction;

  BlockOptions opt;
  opt.include_service_rows = false;
  opt.fixed_design = &design;
  ServiceTerms terms;
  pricing.vars = append_scenario_block(pricing.model, instance, index, scenario, cycles,
                                       pricing.lambda, pricing.gamma, opt, &terms);
  pricing.critical_demand = terms.critical_demand;
  pricing.total_demand = terms.non_critical_demand;

  pricing.model.set_objective_sense(Sense::Maximize);
  // Capped served fractions: the optimum reaches lambda + gamma exactly when
  // the scenario is survivable, so the shortfall is a sound infeasibility
  // measure.
  if (terms.critical_demand > 0.0) {
    pricing.crit_capped_var = pricing.model.add_continuous("price_crit", 0.0, pricing.lambda);
    std::vector<milp::LinearTerm> row{{pricing.crit_capped_var, terms.critical_demand}};
    for (const milp::LinearTerm& t : terms.critical) row.push_back({t.var, -1.0});
    pricing.model.add_constraint("price_crit_cap", row, Relation::LessEqual, 0.0);
    pricing.model.set_objective_coeff(pricing.crit_capped_var, kPricingCriticalWeight);
  }
  if (terms.non_critical_demand > 0.0) {
    pricing.total_capped_var = pricing.model.add_continuous("price_tot", 0.0, pricing.gamma);
    std::vector<milp::LinearTerm> row{{pricing.total_capped_var, terms.non_critical_demand}};
    for (const milp::LinearTerm& t : terms.non_critical) row.push_back({t.var, -1.0});
    pricing.model.add_constraint("price_tot_cap", row, Relation::LessEqual, 0.0);
    pricing.model.set_objective_coeff(pricing.total_capped_var, kPricingTotalWeight);
  }
  return pricing;
}

RepairModel build_repair_model(const NetworkInstance& instance, const Scenario& scenario,
                               const Design& design, const CycleSet& cycles) {
  require_valid(instance);
  std::vector<std::string> issues = validate_design(instance, design);
  if (!issues.empty()) throw Error("invalid design: " + issues.front());

  InstanceIndex index = make_index(instance);
  RepairModel repair;
  BlockOptions opt;
  opt.fixed_design = &design;
  opt.energize_lines = true;
  opt.free_switch_open = true;
  repair.vars = append_scenario_block(repair.model, instance, index, scenario, cycles,
                                      instance.critical_fraction, instance.total_fraction, opt,
                                      nullptr);
  repair.model.set_objective_sense(Sense::Minimize);

  double max_cost = 1.0;
  for (const Edge& edge : instance.edges) max_cost = std::max(max_cost, edge.switch_cost);
  double eps_unit = max_cost * 1e-10 / double(instance.edges.size() + 1);

  repair.switch_build_vars.assign(instance.edges.size(), -1);
  for (int e = 0; e < int(instance.edges.size()); ++e) {
    const Edge& edge = instance.edges[size_t(e)];
    const std::string name = "rep_switch_e" + std::to_string(e);
    int var;
    if (design.switch_built[size_t(e)]) {
      var = repair.model.add_variable(name, 1.0, 1.0, VarType::Binary);
    } else {
      var = repair.model.add_binary(name);
      repair.model.set_objective_coeff(var, edge.switch_cost + eps_unit * double(e + 1));
    }
    repair.switch_build_vars[size_t(e)] = var;
    repair.model.add_constraint("rep_sw_e" + std::to_string(e),
                                {{repair.vars.switch_open[size_t(e)], 1.0}, {var, -1.0}},
                                Relation::LessEqual, 0.0);
  }
  return repair;
}

PricingResult solve_pricing(const NetworkInstance& instance, const Scenario& scenario,
                            const Design& design, const CycleSet& cycles,
                            const milp::SolveParams& params) {
  PricingModel pricing = build_pricing_model(instance, scenario, design, cycles);
  milp::SolveParams local = params;
  local.cutoff.reset();
  local.record_trace = false;
  milp::MipSolution sol = milp::solve_mip(pricing.model, local);

  PricingResult result;
  if (!sol.has_solution()) {
    // Pricing is always feasible (serving nothing is allowed); reaching this
    // means the solver gave up, so report the worst case.
    result.l_value = pricing.lambda + pricing.gamma;
    result.served_critical_fraction = 0.0;
    result.served_total_fraction = 0.0;
    result.operation = ScenarioOperation{};
    result.operation.scenario_id = scenario.id;
    return result;
  }

  double crit_capped = pricing.lambda;
  double total_capped = pricing.gamma;
  double crit_raw = 1.0;
  double total_raw = 1.0;
  if (pricing.crit_capped_var >= 0) {
    crit_capped = sol.assignment[size_t(pricing.crit_capped_var)];
    double served = 0.0;
    const milp::Constraint& cap_row =
        pricing.model.constraint(pricing.model.find_constraint("price_crit_cap"));
    for (const milp::LinearTerm& t : cap_row.terms)
      if (t.coeff == -1.0) served += sol.assignment[size_t(t.var)];
    crit_raw = std::clamp(served / pricing.critical_demand, 0.0, 1.0);
  }
  if (pricing.total_capped_var >= 0) {
    total_capped = sol.assignment[size_t(pricing.total_capped_var)];
    double served = 0.0;
    const milp::Constraint& cap_row =
        pricing.model.constraint(pricing.model.find_constraint("price_tot_cap"));
    for (const milp::LinearTerm& t : cap_row.terms)
      if (t.coeff == -1.0) served += sol.assignment[size_t(t.var)];
    total_raw = std::clamp(served / pricing.total_demand, 0.0, 1.0);
  }

  result.l_value = std::max(0.0, pricing.lambda - crit_capped) +
                   std::max(0.0, pricing.gamma - total_capped);
  result.served_critical_fraction = crit_raw;
  result.served_total_fraction = total_raw;
  result.operation = extract_operation(instance, pricing.vars, sol.assignment);
  return result;
}

Design extract_design(const NetworkInstance& instance, const MasterModel& master,
                      const std::vector<double>& assignment) {
  Design design = Design::empty_for(instance);
  for (const FirstStageVar& fs : master.first_stage) {
    double value = fs.fixed ? fs.fixed_value : assignment.at(size_t(fs.var));
    switch (fs.kind) {
      case FirstStageKind::LineBuilt:
        design.line_built[size_t(fs.edge)] = uint8_t(round_binary(value));
        break;
      case FirstStageKind::SwitchBuilt:
        design.switch_built[size_t(fs.edge)] = uint8_t(round_binary(value));
        break;
      case FirstStageKind::Hardened:
        design.hardened[size_t(fs.edge)] = uint8_t(round_binary(value));
        break;
      case FirstStageKind::FacilityBuilt:
        design.facility_built[size_t(fs.bus)] = uint8_t(round_binary(value));
        break;
      case FirstStageKind::NewCapacity: {
        double v = std::clamp(value, 0.0, fs.capacity_cap);
        if (v < 1e-9) v = 0.0;
        design.new_capacity[size_t(fs.bus)][size_t(fs.phase)] = v;
        break;
      }
    }
  }
  // A facility with no capacity is never useful; drop stray capacity on
  // unbuilt facilities so the design always validates.
  for (std::size_t b = 0; b < design.facility_built.size(); ++b)
    if (!design.facility_built[b]) design.new_capacity[b] = zero_phases();
  return design;
}

ScenarioOperation extract_operation(const NetworkInstance& instance, const ScenarioVars& vars,
                                    const std::vector<double>& assignment) {
  ScenarioOperation op;
  op.scenario_id = vars.scenario_id;
  auto bin = [&](int var) { return uint8_t(var >= 0 && assignment.at(size_t(var)) >= 0.5); };
  auto real = [&](int var) { return var >= 0 ? assignment.at(size_t(var)) : 0.0; };

  const std::size_t ne = instance.edges.size();
  const std::size_t nb = instance.buses.size();
  op.line_used.resize(ne);
  op.switch_open.resize(ne);
  op.harden_used.resize(ne);
  op.direction_neg.resize(ne);
  op.direction_pos.resize(ne);
  op.flow.assign(ne, zero_phases());
  for (std::size_t e = 0; e < ne; ++e) {
    op.line_used[e] = bin(vars.line_used[e]);
    op.switch_open[e] = bin(vars.switch_open[e]);
    op.harden_used[e] = bin(vars.harden_used[e]);
    op.direction_neg[e] = bin(vars.direction_neg[e]);
    op.direction_pos[e] = bin(vars.direction_pos[e]);
    for (int k = 0; k < kNumPhases; ++k) op.flow[e][size_t(k)] = real(vars.flow[e][size_t(k)]);
  }
  op.facility_used.resize(nb);
  op.capacity_used.assign(nb, zero_phases());
  op.generation.assign(nb, zero_phases());
  op.served_load.assign(nb, zero_phases());
  op.block_served.assign(nb, {});
  for (std::size_t b = 0; b < nb; ++b) {
    op.facility_used[b] = bin(vars.facility_used[b]);
    for (int k = 0; k < kNumPhases; ++k) {
      op.capacity_used[b][size_t(k)] = real(vars.capacity_used[b][size_t(k)]);
      op.generation[b][size_t(k)] = real(vars.generation[b][size_t(k)]);
      op.served_load[b][size_t(k)] = real(vars.served_load[b][size_t(k)]);
    }
    for (int v : vars.block_served[b]) op.block_served[b].push_back(bin(v));
  }
  op.chance_violated = bin(vars.chance_var);
  return op;
}

}  // namespace gridforge
