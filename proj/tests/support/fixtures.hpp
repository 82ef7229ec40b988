#ifndef GRIDFORGE_TESTS_SUPPORT_FIXTURES_HPP
#define GRIDFORGE_TESTS_SUPPORT_FIXTURES_HPP

#include <cstdint>

#include "gridforge/network.hpp"
#include "gridforge/scenario.hpp"

namespace gridforge::testing {

// Three buses in a triangle, single phase A, all lines pre-built and
// hardenable at cost 10. b0 is the source (existing capacity 100), b1 carries
// the critical block, b2 a non-critical block. Edges: e0=(b0,b1), e1=(b0,b2),
// e2=(b1,b2).
NetworkInstance tri3();

// tri3 wrapped around a buildable facility at b1 (cost 50, capacity cost 1).
NetworkInstance tri3_with_facility();

// Source plus one critical bus joined by three parallel edges, harden cost 10
// each. Scenario 0 kills the hardened e1, scenario 1 kills the hardened e0;
// hardening e2 fixes both. Greedy lands on 20, the optimum is 10.
struct ParallelFixture {
  NetworkInstance instance;
  ScenarioSet scenarios;
};
ParallelFixture disjoint_hardening();

// Scenario helpers.
Scenario scenario_of(int id, std::vector<std::string> damaged,
                     std::vector<std::string> hardened_damaged = {});
ScenarioSet set_of(std::vector<Scenario> scenarios);

// Seeded random acceptance-suite instance: 4-6 buses, <= 9 edges, all edges
// pre-built with existing switches, a subset hardenable, occasionally a
// candidate line or facility; 2-3 sampled scenarios. Guaranteed feasible
// (hardening everything plus full generation serves all load) and within the
// oracle's binary budget.
struct SuiteCase {
  NetworkInstance instance;
  ScenarioSet scenarios;
};
SuiteCase suite_case(uint64_t seed);

// Instance whose lambda sweep steps through three tiers of critical load.
struct TieredFixture {
  NetworkInstance instance;
  ScenarioSet scenarios;
};
TieredFixture tiered_critical();

// 20 scenarios over the parallel fixture topology for the chance-constraint
// checks: eight need one hardening (cost 10), two need a second, expensive
// one (cost 40), ten are benign.
struct ChanceFixture {
  NetworkInstance instance;
  ScenarioSet scenarios;
};
ChanceFixture chance_instance();

// 3-phase chain with a 0.15-imbalance transformer feeding unbalanced blocks.
struct PhasedFixture {
  NetworkInstance instance;
  ScenarioSet scenarios;
};
PhasedFixture three_phase_transformer();

}  // namespace gridforge::testing

#endif
