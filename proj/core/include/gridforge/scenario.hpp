#ifndef GRIDFORGE_SCENARIO_HPP
#define GRIDFORGE_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridforge/network.hpp"

namespace gridforge {

// Ice-storm style damage model: a one-mile line segment fails independently
// with per_mile_probability; hardened lines fail at hardened_rate_ratio times
// that rate (0 means hardened lines are not damageable).
struct DamageModel {
  double per_mile_probability = 0.0;
  double hardened_rate_ratio = 0.0;
  uint64_t rng_seed = 0;
};

// One sampled disaster: the edges inoperable when unhardened, and the subset
// inoperable even when hardened.
struct Scenario {
  int id = 0;
  std::vector<std::string> damaged_edges;           // sorted, unique
  std::vector<std::string> hardened_damaged_edges;  // sorted, subset of damaged_edges

  bool damages(const std::string& edge_id) const;
  bool damages_hardened(const std::string& edge_id) const;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
  std::optional<DamageModel> source_model;  // absent for user-provided sets
  std::string rng_algorithm;                // recorded for reproducibility

  std::size_t size() const { return scenarios.size(); }
};

// Paper default: 100 sampled scenarios capture the damage distribution.
inline constexpr int kDefaultScenarioCount = 100;

// Probability that a line of the given length fails, treating one-mile
// segments as independent: 1 - (1 - per_mile)^length. Fractional lengths use
// the real-valued exponent. Throws std::domain_error outside the domain.
double line_failure_probability(double per_mile, double length_miles);

// Samples `count` scenarios. One uniform draw per (scenario, edge) decides
// both sets: damaged iff u < P, hardened-damaged iff u < P', with P' <= P, so
// the hardened-damaged set is always nested inside the damaged set.
// Deterministic given model.rng_seed.
ScenarioSet sample_scenarios(const NetworkInstance& instance, const DamageModel& model,
                             int count);

}  // namespace gridforge

#endif
