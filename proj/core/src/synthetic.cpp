#include <algorithm>
#include <cmath>

#include "gridforge/io.hpp"
#include "gridforge/rng.hpp"

namespace gridforge {

namespace {

double round_cents(double v) { return std::round(v * 100.0) / 100.0; }

Phase rotate_phase(int i) { return kAllPhases[size_t(i % kNumPhases)]; }

}  // namespace

// Multi-feeder synthetic systems: each feeder is a radial tree hung off a
// substation bus with ample existing generation; candidate upgrades are
// tie-lines between feeders, parallels of feeder trunks, hardening on every
// existing line and distributed generation at load buses. Urban and rural
// differ in edge lengths, which drive the expansion costs.
NetworkInstance generate_synthetic(Profile profile, int n_feeders, int buses_per_feeder,
                                   uint64_t seed) {
  if (n_feeders < 1) throw Error("n_feeders must be at least 1");
  if (buses_per_feeder < 2) throw Error("buses_per_feeder must be at least 2");

  SplitMix64 rng(seed);
  NetworkInstance instance;

  const double len_lo = profile == Profile::Urban ? 0.1 : 1.0;
  const double len_hi = profile == Profile::Urban ? 0.5 : 5.0;
  const double harden_rate = 8.0;   // per mile
  const double build_rate = 25.0;   // per mile
  const double switch_cost = 2.0;

  auto draw_length = [&]() { return round_cents(rng.next_real(len_lo, len_hi)); };

  // Buses.
  for (int f = 0; f < n_feeders; ++f) {
    for (int i = 0; i < buses_per_feeder; ++i) {
      Bus bus;
      bus.id = "b" + std::to_string(f * buses_per_feeder + i);
      if (i == 0) {
        bus.phases = PhaseSet::all();  // substation
      } else {
        bus.phases = rng.next_unit() < 0.6 ? PhaseSet::all()
                                           : PhaseSet::single(rotate_phase(int(rng.next_below(3))));
        bus.is_critical = rng.next_unit() < 0.3;
        int blocks = rng.next_unit() < 0.7 ? 1 : 2;
        for (int blk = 0; blk < blocks; ++blk) {
          // Multi-phase loads are installed near-balanced, as utilities do;
          // the residual imbalance still exercises the transformer band.
          LoadBlock block;
          double base = rng.next_real(0.5, 2.0);
          for (Phase p : kAllPhases)
            if (bus.phases.contains(p))
              block.demand[static_cast<int>(p)] =
                  round_cents(base * rng.next_real(0.92, 1.08));
          bus.load_blocks.push_back(block);
        }
        if (rng.next_unit() < 0.3) {
          GenerationSite site;
          for (Phase p : kAllPhases)
            if (bus.phases.contains(p))
              site.max_new_capacity[static_cast<int>(p)] =
                  round_cents(1.5 * bus.total_demand(p) + 1.0);
          site.facility_cost = round_cents(rng.next_real(20.0, 60.0));
          for (Phase p : kAllPhases)
            if (bus.phases.contains(p))
              site.capacity_cost[static_cast<int>(p)] = round_cents(rng.next_real(0.5, 2.0));
          bus.generation = site;
        }
      }
      instance.buses.push_back(std::move(bus));
    }
  }

  // Comfortable line ratings; the formulation caps its own big-M terms at
  // the total phase demand anyway.
  PerPhase demand_so_far = zero_phases();
  for (const Bus& bus : instance.buses)
    for (Phase p : kAllPhases) demand_so_far[static_cast<int>(p)] += bus.total_demand(p);
  double capacity = std::max(
      5.0, 3.0 * std::max({demand_so_far[0], demand_so_far[1], demand_so_far[2]}));

  int edge_counter = 0;
  auto add_edge = [&](int from, int to, PhaseSet phases, double length, bool exists,
                      bool transformer) {
    Edge edge;
    edge.id = "e" + std::to_string(edge_counter++);
    edge.from = instance.buses[size_t(from)].id;
    edge.to = instance.buses[size_t(to)].id;
    edge.phases = phases;
    for (Phase p : kAllPhases)
      if (phases.contains(p)) edge.capacity[static_cast<int>(p)] = capacity;
    edge.length_miles = length;
    edge.is_transformer = transformer;
    edge.phase_imbalance_limit = transformer ? kTransformerImbalanceLimit : kLineImbalanceLimit;
    edge.exists = exists;
    edge.has_existing_switch = exists && rng.next_unit() < 0.5;
    edge.hardenable = true;
    edge.build_cost = exists ? 0.0 : round_cents(build_rate * length);
    edge.switch_cost = switch_cost;
    edge.harden_cost = round_cents(harden_rate * length);
    instance.edges.push_back(std::move(edge));
    return int(instance.edges.size()) - 1;
  };

  // Radial feeder trees; the first edge of each feeder is the substation
  // transformer.
  for (int f = 0; f < n_feeders; ++f) {
    int base = f * buses_per_feeder;
    for (int i = 1; i < buses_per_feeder; ++i) {
      int parent = base + int(rng.next_below(uint64_t(i)));
      int child = base + i;
      PhaseSet child_phases = instance.buses[size_t(child)].phases;
      PhaseSet parent_phases = instance.buses[size_t(parent)].phases;
      PhaseSet common = child_phases.intersect(parent_phases);
      if (common.empty()) {
        // Reparent to the substation, which carries all phases.
        parent = base;
        common = child_phases;
      }
      add_edge(parent, child, common, draw_length(), true, i == 1);
    }
    // Occasional candidate parallel of an existing feeder edge.
    if (buses_per_feeder > 2 && rng.next_unit() < 0.4) {
      int pick = base + 1 + int(rng.next_below(uint64_t(buses_per_feeder - 1)));
      const Edge& proto = instance.edges[size_t(pick - 1 - f)];
      // Find the tree edge whose child is `pick` by scanning this feeder's
      // edges; the parallel copy is a non-existing candidate.
      for (int e = 0; e < int(instance.edges.size()); ++e) {
        const Edge& cand = instance.edges[size_t(e)];
        if (cand.to == instance.buses[size_t(pick)].id && cand.exists) {
          InstanceIndex idx = make_index(instance);
          add_edge(idx.bus.at(cand.from), pick, cand.phases, cand.length_miles, false, false);
          break;
        }
      }
      (void)proto;
    }
  }

  // Candidate tie-lines between adjacent feeders.
  for (int f = 0; f + 1 < n_feeders; ++f) {
    int ties = 1 + (rng.next_unit() < 0.5 ? 1 : 0);
    for (int t = 0; t < ties; ++t) {
      int a = f * buses_per_feeder + int(rng.next_below(uint64_t(buses_per_feeder)));
      int b = (f + 1) * buses_per_feeder + int(rng.next_below(uint64_t(buses_per_feeder)));
      PhaseSet common = instance.buses[size_t(a)].phases.intersect(instance.buses[size_t(b)].phases);
      if (common.empty()) {
        a = f * buses_per_feeder;
        b = (f + 1) * buses_per_feeder;
        common = PhaseSet::all();
      }
      add_edge(a, b, common, round_cents(draw_length() * 2.0), false, false);
    }
  }

  // Substation capacity covers the whole system with headroom.
  PerPhase total_demand = zero_phases();
  for (const Bus& bus : instance.buses)
    for (Phase p : kAllPhases)
      total_demand[static_cast<int>(p)] += bus.total_demand(p);
  for (int f = 0; f < n_feeders; ++f) {
    Bus& head = instance.buses[size_t(f * buses_per_feeder)];
    GenerationSite site;
    for (Phase p : kAllPhases)
      site.existing_capacity[static_cast<int>(p)] =
          round_cents(2.0 * total_demand[static_cast<int>(p)] + 10.0);
    head.generation = site;
  }

  return instance;
}

}  // namespace gridforge
