#include "gridforge/network.hpp"

#include <cmath>
#include <unordered_set>

namespace gridforge {

InstanceIndex make_index(const NetworkInstance& instance) {
  InstanceIndex index;
  index.bus.reserve(instance.buses.size());
  for (int i = 0; i < int(instance.buses.size()); ++i) index.bus.emplace(instance.buses[i].id, i);
  index.edge.reserve(instance.edges.size());
  for (int i = 0; i < int(instance.edges.size()); ++i) index.edge.emplace(instance.edges[i].id, i);
  return index;
}

namespace {

bool nonnegative(const PerPhase& v) { return v[0] >= 0.0 && v[1] >= 0.0 && v[2] >= 0.0; }

bool zero_outside(const PerPhase& v, PhaseSet phases) {
  for (Phase p : kAllPhases)
    if (!phases.contains(p) && v[static_cast<int>(p)] != 0.0) return false;
  return true;
}

}  // namespace

ValidationReport validate_instance(const NetworkInstance& instance) {
  ValidationReport report;
  auto issue = [&](const std::string& subject, const std::string& message) {
    report.issues.push_back({subject, message});
  };

  std::unordered_set<std::string> bus_ids;
  for (const Bus& bus : instance.buses) {
    if (!bus_ids.insert(bus.id).second) issue(bus.id, "duplicate bus id");
    if (bus.phases.empty()) issue(bus.id, "bus has an empty phase set");
    for (std::size_t j = 0; j < bus.load_blocks.size(); ++j) {
      const LoadBlock& block = bus.load_blocks[j];
      if (!nonnegative(block.demand))
        issue(bus.id, "load block " + std::to_string(j) + " has negative demand");
      if (!zero_outside(block.demand, bus.phases))
        issue(bus.id, "load block " + std::to_string(j) + " demands power on a phase outside the bus phase set");
      if (phase_sum(block.demand) <= 0.0)
        issue(bus.id, "load block " + std::to_string(j) + " has no positive demand on any phase");
    }
    if (bus.generation) {
      const GenerationSite& site = *bus.generation;
      if (!nonnegative(site.existing_capacity)) issue(bus.id, "negative existing generation capacity");
      if (!nonnegative(site.max_new_capacity)) issue(bus.id, "negative max new generation capacity");
      if (!zero_outside(site.max_new_capacity, bus.phases))
        issue(bus.id, "buildable generation capacity on a phase outside the bus phase set");
      if (!zero_outside(site.existing_capacity, bus.phases))
        issue(bus.id, "existing generation capacity on a phase outside the bus phase set");
      if (site.facility_cost < 0.0) issue(bus.id, "negative facility cost");
      if (!nonnegative(site.capacity_cost)) issue(bus.id, "negative capacity cost");
    }
  }

  InstanceIndex index = make_index(instance);
  std::unordered_set<std::string> edge_ids;
  for (const Edge& edge : instance.edges) {
    if (!edge_ids.insert(edge.id).second) issue(edge.id, "duplicate edge id");
    auto from_it = index.bus.find(edge.from);
    auto to_it = index.bus.find(edge.to);
    if (from_it == index.bus.end()) issue(edge.id, "endpoint references missing bus '" + edge.from + "'");
    if (to_it == index.bus.end()) issue(edge.id, "endpoint references missing bus '" + edge.to + "'");
    if (edge.from == edge.to) issue(edge.id, "self-loop edges are not allowed");
    if (edge.phases.empty()) issue(edge.id, "edge has an empty phase set");
    if (from_it != index.bus.end() && to_it != index.bus.end()) {
      PhaseSet common =
          instance.buses[size_t(from_it->second)].phases.intersect(instance.buses[size_t(to_it->second)].phases);
      if (!edge.phases.subset_of(common))
        issue(edge.id, "edge phase set is not contained in both endpoint phase sets");
    }
    for (Phase p : kAllPhases) {
      double cap = edge.capacity[static_cast<int>(p)];
      if (edge.phases.contains(p)) {
        if (cap <= 0.0) issue(edge.id, "nonpositive capacity on carried phase");
      } else if (cap != 0.0) {
        issue(edge.id, "capacity assigned to a phase the edge does not carry");
      }
    }
    if (edge.length_miles < 0.0) issue(edge.id, "negative length");
    if (!(edge.phase_imbalance_limit > 0.0 && edge.phase_imbalance_limit <= 1.0))
      issue(edge.id, "phase imbalance limit must lie in (0, 1]");
    if (edge.exists && edge.build_cost != 0.0)
      issue(edge.id, "existing line must have zero build cost");
    if (edge.build_cost < 0.0 || edge.switch_cost < 0.0 || edge.harden_cost < 0.0)
      issue(edge.id, "negative upgrade cost");
  }

  if (!(instance.critical_fraction >= 0.0 && instance.critical_fraction <= 1.0))
    issue("", "critical_fraction outside [0, 1]");
  if (!(instance.total_fraction >= 0.0 && instance.total_fraction <= 1.0))
    issue("", "total_fraction outside [0, 1]");

  return report;
}

}  // namespace gridforge
