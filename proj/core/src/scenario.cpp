#include "gridforge/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gridforge/rng.hpp"

namespace gridforge {

bool Scenario::damages(const std::string& edge_id) const {
  return std::binary_search(damaged_edges.begin(), damaged_edges.end(), edge_id);
}

bool Scenario::damages_hardened(const std::string& edge_id) const {
  return std::binary_search(hardened_damaged_edges.begin(), hardened_damaged_edges.end(), edge_id);
}

double line_failure_probability(double per_mile, double length_miles) {
  if (!(per_mile >= 0.0 && per_mile <= 1.0))
    throw std::domain_error("per-mile probability must lie in [0, 1]");
  if (!(length_miles >= 0.0)) throw std::domain_error("line length must be nonnegative");
  if (length_miles == 0.0) return 0.0;
  if (per_mile == 1.0) return 1.0;
  // Independent one-mile segments; fractional lengths use the real exponent.
  return 1.0 - std::pow(1.0 - per_mile, length_miles);
}

ScenarioSet sample_scenarios(const NetworkInstance& instance, const DamageModel& model, int count) {
  ScenarioSet set;
  set.source_model = model;
  set.rng_algorithm = kRngAlgorithmName;
  set.scenarios.reserve(size_t(std::max(count, 0)));

  for (int s = 0; s < count; ++s) {
    Scenario scenario;
    scenario.id = s;
    for (std::size_t e = 0; e < instance.edges.size(); ++e) {
      const Edge& edge = instance.edges[e];
      double p = line_failure_probability(model.per_mile_probability, edge.length_miles);
      double p_hard =
          line_failure_probability(model.per_mile_probability * model.hardened_rate_ratio,
                                   edge.length_miles);
      // Single coupled draw: p_hard <= p guarantees the nested sets, and
      // raising the damage rate can only grow the damage set for a fixed seed.
      double u = uniform_at(model.rng_seed, uint64_t(s), uint64_t(e));
      if (u < p) {
        scenario.damaged_edges.push_back(edge.id);
        if (u < p_hard) scenario.hardened_damaged_edges.push_back(edge.id);
      }
    }
    std::sort(scenario.damaged_edges.begin(), scenario.damaged_edges.end());
    std::sort(scenario.hardened_damaged_edges.begin(), scenario.hardened_damaged_edges.end());
    set.scenarios.push_back(std::move(scenario));
  }
  return set;
}

}  // namespace gridforge
