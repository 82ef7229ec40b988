#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>

#include "gridforge/cycles.hpp"
#include "gridforge/formulation.hpp"
#include "gridforge/rng.hpp"

namespace gridforge::testing {

namespace {

Bus make_bus(std::string id, PhaseSet phases, bool critical, double demand_a) {
  Bus bus;
  bus.id = std::move(id);
  bus.phases = phases;
  bus.is_critical = critical;
  if (demand_a > 0.0) {
    LoadBlock block;
    block.demand[0] = demand_a;
    bus.load_blocks.push_back(block);
  }
  return bus;
}

Bus make_source(std::string id, double capacity_a) {
  Bus bus;
  bus.id = std::move(id);
  bus.phases = PhaseSet::single(Phase::A);
  GenerationSite site;
  site.existing_capacity[0] = capacity_a;
  bus.generation = site;
  return bus;
}

Edge make_edge(std::string id, std::string from, std::string to, double harden_cost,
               bool with_switch = true) {
  Edge e;
  e.id = std::move(id);
  e.from = std::move(from);
  e.to = std::move(to);
  e.phases = PhaseSet::single(Phase::A);
  e.capacity[0] = 10.0;
  e.length_miles = 1.0;
  e.exists = true;
  e.has_existing_switch = with_switch;
  e.hardenable = true;
  e.harden_cost = harden_cost;
  e.switch_cost = 1.0;
  return e;
}

}  // namespace

NetworkInstance tri3() {
  NetworkInstance inst;
  inst.buses.push_back(make_source("b0", 100.0));
  inst.buses.push_back(make_bus("b1", PhaseSet::single(Phase::A), true, 1.0));
  inst.buses.push_back(make_bus("b2", PhaseSet::single(Phase::A), false, 1.0));
  inst.edges.push_back(make_edge("e0", "b0", "b1", 10.0));
  inst.edges.push_back(make_edge("e1", "b0", "b2", 10.0));
  inst.edges.push_back(make_edge("e2", "b1", "b2", 10.0));
  return inst;
}

NetworkInstance tri3_with_facility() {
  NetworkInstance inst = tri3();
  GenerationSite site;
  site.max_new_capacity[0] = 2.0;
  site.facility_cost = 50.0;
  site.capacity_cost[0] = 1.0;
  inst.buses[1].generation = site;
  return inst;
}

Scenario scenario_of(int id, std::vector<std::string> damaged,
                     std::vector<std::string> hardened_damaged) {
  Scenario s;
  s.id = id;
  s.damaged_edges = std::move(damaged);
  s.hardened_damaged_edges = std::move(hardened_damaged);
  std::sort(s.damaged_edges.begin(), s.damaged_edges.end());
  std::sort(s.hardened_damaged_edges.begin(), s.hardened_damaged_edges.end());
  return s;
}

ScenarioSet set_of(std::vector<Scenario> scenarios) {
  ScenarioSet set;
  for (std::size_t i = 0; i < scenarios.size(); ++i) scenarios[i].id = int(i);
  set.scenarios = std::move(scenarios);
  return set;
}

ParallelFixture disjoint_hardening() {
  ParallelFixture fx;
  NetworkInstance& inst = fx.instance;
  inst.buses.push_back(make_source("b0", 100.0));
  inst.buses.push_back(make_bus("b1", PhaseSet::single(Phase::A), true, 1.0));
  inst.edges.push_back(make_edge("e0", "b0", "b1", 10.0));
  inst.edges.push_back(make_edge("e1", "b0", "b1", 10.0));
  inst.edges.push_back(make_edge("e2", "b0", "b1", 10.0));
  fx.scenarios = set_of({scenario_of(0, {"e0", "e1", "e2"}, {"e1"}),
                         scenario_of(1, {"e0", "e1", "e2"}, {"e0"})});
  return fx;
}

SuiteCase suite_case(uint64_t seed) {
  // Deterministic rejection loop: bump the sub-seed until the sampled
  // scenarios damage something and the instance stays within budget.
  for (uint64_t attempt = 0;; ++attempt) {
    SplitMix64 rng(splitmix64_mix(seed * 7919ull + attempt));
    NetworkInstance inst;
    int n_bus = 4 + int(rng.next_below(3));

    inst.buses.push_back(make_source("b0", 100.0));
    for (int b = 1; b < n_bus; ++b) {
      bool critical = rng.next_unit() < 0.4;
      double demand = std::round(rng.next_real(0.5, 2.0) * 100.0) / 100.0;
      inst.buses.push_back(
          make_bus("b" + std::to_string(b), PhaseSet::single(Phase::A), critical, demand));
    }

    // Random spanning tree plus up to two extra edges (ring or parallel).
    int edge_counter = 0;
    auto add = [&](int from, int to, bool exists, bool hardenable) {
      Edge e = make_edge("e" + std::to_string(edge_counter++), "b" + std::to_string(from),
                         "b" + std::to_string(to),
                         std::round(rng.next_real(5.0, 20.0) * 100.0) / 100.0);
      e.exists = exists;
      e.hardenable = hardenable;
      if (!exists) e.build_cost = std::round(rng.next_real(10.0, 30.0) * 100.0) / 100.0;
      inst.edges.push_back(e);
    };
    for (int b = 1; b < n_bus; ++b) add(int(rng.next_below(uint64_t(b))), b, true, true);
    int extras = int(rng.next_below(3));
    for (int x = 0; x < extras && int(inst.edges.size()) < 9; ++x) {
      int a = int(rng.next_below(uint64_t(n_bus)));
      int b = int(rng.next_below(uint64_t(n_bus)));
      if (a == b) continue;
      bool exists = rng.next_unit() < 0.5;
      add(std::min(a, b), std::max(a, b), exists, exists);  // candidates not hardenable
    }

    // Occasionally a buildable facility at one load bus.
    if (rng.next_unit() < 0.35) {
      int b = 1 + int(rng.next_below(uint64_t(n_bus - 1)));
      GenerationSite site;
      site.max_new_capacity[0] =
          std::max(1.0, 1.5 * inst.buses[size_t(b)].total_demand(Phase::A));
      site.facility_cost = std::round(rng.next_real(20.0, 60.0) * 100.0) / 100.0;
      site.capacity_cost[0] = std::round(rng.next_real(0.5, 2.0) * 100.0) / 100.0;
      inst.buses[size_t(b)].generation = site;
    }

    // Candidate binary budget: hardenings + candidate lines + facilities.
    int binaries = 0;
    for (const Edge& e : inst.edges) {
      if (e.hardenable) ++binaries;
      if (!e.exists) ++binaries;
    }
    for (const Bus& b : inst.buses)
      if (b.generation && phase_sum(b.generation->max_new_capacity) > 0.0) ++binaries;
    if (binaries > 11) continue;

    DamageModel model{0.15 + 0.25 * rng.next_unit(), rng.next_unit() < 0.5 ? 0.0 : 0.1,
                      rng.next_u64()};
    int count = 2 + int(rng.next_below(2));
    ScenarioSet scenarios = sample_scenarios(inst, model, count);
    std::size_t damaged_total = 0;
    for (const Scenario& s : scenarios.scenarios) damaged_total += s.damaged_edges.size();
    if (damaged_total == 0) continue;

    // Feasibility guard: the everything-design must survive every scenario,
    // otherwise a bus cut off through non-hardenable candidates would poison
    // the suite.
    bool feasible = true;
    {
      Design everything = Design::empty_for(inst);
      for (std::size_t e = 0; e < inst.edges.size(); ++e) {
        everything.line_built[e] = 1;
        if (inst.edges[e].hardenable) everything.hardened[e] = 1;
      }
      for (std::size_t b = 0; b < inst.buses.size(); ++b) {
        const Bus& bus = inst.buses[b];
        if (bus.generation && phase_sum(bus.generation->max_new_capacity) > 0.0) {
          everything.facility_built[b] = 1;
          everything.new_capacity[b] = bus.generation->max_new_capacity;
        }
      }
      CycleSet cycles = enumerate_cycles(inst);
      for (const Scenario& s : scenarios.scenarios) {
        PricingResult pr = solve_pricing(inst, s, everything, cycles);
        if (pr.l_value > 1e-6) feasible = false;
      }
    }
    if (!feasible) continue;

    return SuiteCase{std::move(inst), std::move(scenarios)};
  }
}

TieredFixture tiered_critical() {
  TieredFixture fx;
  NetworkInstance& inst = fx.instance;
  inst.buses.push_back(make_source("b0", 100.0));
  inst.buses.push_back(make_bus("b1", PhaseSet::single(Phase::A), true, 0.5));
  inst.buses.push_back(make_bus("b2", PhaseSet::single(Phase::A), true, 0.3));
  inst.buses.push_back(make_bus("b3", PhaseSet::single(Phase::A), true, 0.2));
  inst.edges.push_back(make_edge("e0", "b0", "b1", 5.0));
  inst.edges.push_back(make_edge("e1", "b0", "b2", 10.0));
  inst.edges.push_back(make_edge("e2", "b0", "b3", 25.0));
  // One storm knocks out the b2 and b3 laterals.
  fx.scenarios = set_of({scenario_of(0, {"e1", "e2"})});
  fx.instance.total_fraction = 0.0;  // no non-critical load here
  return fx;
}

ChanceFixture chance_instance() {
  ChanceFixture fx;
  NetworkInstance& inst = fx.instance;
  inst.buses.push_back(make_source("b0", 100.0));
  inst.buses.push_back(make_bus("b1", PhaseSet::single(Phase::A), true, 1.0));
  inst.edges.push_back(make_edge("e0", "b0", "b1", 10.0));
  inst.edges.push_back(make_edge("e1", "b0", "b1", 10.0));
  inst.edges.push_back(make_edge("e2", "b0", "b1", 10.0));
  inst.edges.push_back(make_edge("e3", "b0", "b1", 40.0));

  std::vector<Scenario> scenarios;
  // Eight scenarios leave only e2 repairable, two only e3, ten are benign.
  for (int i = 0; i < 8; ++i)
    scenarios.push_back(scenario_of(0, {"e0", "e1", "e2", "e3"}, {"e0", "e1", "e3"}));
  for (int i = 0; i < 2; ++i)
    scenarios.push_back(scenario_of(0, {"e0", "e1", "e2", "e3"}, {"e0", "e1", "e2"}));
  for (int i = 0; i < 10; ++i) scenarios.push_back(scenario_of(0, {}));
  fx.scenarios = set_of(std::move(scenarios));
  return fx;
}

PhasedFixture three_phase_transformer() {
  PhasedFixture fx;
  NetworkInstance& inst = fx.instance;

  Bus source;
  source.id = "b0";
  source.phases = PhaseSet::all();
  GenerationSite site;
  site.existing_capacity = {50.0, 50.0, 50.0};
  source.generation = site;
  inst.buses.push_back(source);

  Bus mid;
  mid.id = "b1";
  mid.phases = PhaseSet::all();
  inst.buses.push_back(mid);

  Bus load;
  load.id = "b2";
  load.phases = PhaseSet::all();
  load.is_critical = true;
  LoadBlock block;
  block.demand = {1.0, 0.95, 1.05};
  load.load_blocks.push_back(block);
  LoadBlock extra;
  extra.demand = {0.2, 0.25, 0.15};
  load.load_blocks.push_back(extra);
  inst.buses.push_back(load);

  Edge transformer;
  transformer.id = "e0";
  transformer.from = "b0";
  transformer.to = "b1";
  transformer.phases = PhaseSet::all();
  transformer.capacity = {20.0, 20.0, 20.0};
  transformer.length_miles = 0.1;
  transformer.is_transformer = true;
  transformer.phase_imbalance_limit = kTransformerImbalanceLimit;
  transformer.exists = true;
  transformer.has_existing_switch = true;
  transformer.hardenable = true;
  transformer.harden_cost = 12.0;
  transformer.switch_cost = 1.0;
  inst.edges.push_back(transformer);

  Edge line = transformer;
  line.id = "e1";
  line.from = "b1";
  line.to = "b2";
  line.is_transformer = false;
  line.phase_imbalance_limit = kLineImbalanceLimit;
  line.length_miles = 1.0;
  line.harden_cost = 8.0;
  inst.edges.push_back(line);

  fx.scenarios = set_of({scenario_of(0, {}), scenario_of(1, {"e1"})});
  return fx;
}

}  // namespace gridforge::testing
