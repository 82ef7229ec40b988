#ifndef GRIDFORGE_NETWORK_HPP
#define GRIDFORGE_NETWORK_HPP

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridforge/phases.hpp"

namespace gridforge {

// One all-or-nothing unit of demand at a bus: either every phase of the block
// is served or none of it is.
struct LoadBlock {
  PerPhase demand = zero_phases();
};

// Generation attached to a bus: pre-existing capacity plus an optional
// buildable facility with a per-phase capacity cap.
struct GenerationSite {
  PerPhase existing_capacity = zero_phases();
  PerPhase max_new_capacity = zero_phases();
  double facility_cost = 0.0;
  PerPhase capacity_cost = zero_phases();  // cost per unit of new capacity
};

struct Bus {
  std::string id;
  PhaseSet phases;
  std::vector<LoadBlock> load_blocks;
  std::optional<GenerationSite> generation;
  bool is_critical = false;

  double total_demand(Phase p) const {
    double d = 0.0;
    for (const auto& b : load_blocks) d += b.demand[static_cast<int>(p)];
    return d;
  }
};

// Default per-phase flow imbalance limits.
inline constexpr double kTransformerImbalanceLimit = 0.15;
inline constexpr double kLineImbalanceLimit = 1.0;

// A line or transformer. Parallel edges between the same bus pair are allowed
// (the network is a multigraph).
struct Edge {
  std::string id;
  std::string from;
  std::string to;
  PhaseSet phases;
  PerPhase capacity = zero_phases();
  double length_miles = 0.0;
  bool is_transformer = false;
  double phase_imbalance_limit = kLineImbalanceLimit;
  bool exists = false;
  bool has_existing_switch = false;
  bool hardenable = false;
  double build_cost = 0.0;
  double switch_cost = 0.0;
  double harden_cost = 0.0;
};

inline constexpr double kDefaultCriticalFraction = 0.98;
inline constexpr double kDefaultTotalFraction = 0.5;

struct NetworkInstance {
  std::vector<Bus> buses;
  std::vector<Edge> edges;
  double critical_fraction = kDefaultCriticalFraction;  // of critical-bus load
  double total_fraction = kDefaultTotalFraction;        // of remaining load
};

// Cached id -> index lookup for an instance.
struct InstanceIndex {
  std::unordered_map<std::string, int> bus;
  std::unordered_map<std::string, int> edge;
};

InstanceIndex make_index(const NetworkInstance& instance);

struct ValidationIssue {
  std::string subject;  // bus or edge id, empty for instance-level issues
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Checks the structural invariants of an instance. Violations are data, not
// failures: the report lists them and an empty report means valid.
ValidationReport validate_instance(const NetworkInstance& instance);

}  // namespace gridforge

#endif
