#ifndef GRIDFORGE_IO_HPP
#define GRIDFORGE_IO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridforge/algorithms.hpp"
#include "gridforge/network.hpp"
#include "gridforge/scenario.hpp"

namespace gridforge {

inline constexpr int kSchemaVersion = 1;

// Instance files are JSON documents (see docs/schemas/instance.schema.json).
// Loading validates the instance and throws ParseError on malformed input.
// An instance file may embed a scenario set under "scenarios"; pass
// `embedded` to receive it.
NetworkInstance load_instance(const std::string& path,
                              std::optional<ScenarioSet>* embedded = nullptr);
NetworkInstance parse_instance_json(const std::string& text,
                                    std::optional<ScenarioSet>* embedded = nullptr);
std::string instance_to_json(const NetworkInstance& instance);
void save_instance(const NetworkInstance& instance, const std::string& path);

ScenarioSet load_scenarios(const std::string& path);
ScenarioSet parse_scenarios_json(const std::string& text);
std::string scenarios_to_json(const ScenarioSet& scenarios);
void save_scenarios(const ScenarioSet& scenarios, const std::string& path);

Design load_design(const std::string& path, const NetworkInstance& instance);
std::string design_to_json(const NetworkInstance& instance, const Design& design);

// Full report as JSON plus a CSV sibling (same stem, .csv extension): one
// pricing row per scenario and one summary row. include_timing=false yields
// byte-reproducible files.
std::string report_to_json(const NetworkInstance& instance, const SolveReport& report,
                           bool include_timing = true);
std::string report_to_csv(const SolveReport& report, bool include_timing = true);
void save_results(const NetworkInstance& instance, const SolveReport& report,
                  const std::string& json_path, bool include_timing = true);

// Synthetic instance generation in the style of multi-feeder test systems.
enum class Profile { Urban, Rural };

NetworkInstance generate_synthetic(Profile profile, int n_feeders, int buses_per_feeder,
                                   uint64_t seed);

// Parameter sweeps.
enum class SweepParameter { Lambda, Epsilon, PerMileProbability };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::Lambda;
  std::vector<double> grid;  // strictly increasing
  std::string algorithm = "extensive";
  uint64_t seed = 0;        // scenario regeneration seed for damage sweeps
  int scenario_count = kDefaultScenarioCount;
  double hardened_ratio = 0.0;
  double time_limit_seconds = 1e18;
};

// One CSV row per grid value: parameter,value,objective,cpu_seconds,status.
// A per-row TimeLimit is recorded and the sweep continues.
std::string run_sweep(const NetworkInstance& instance, const ScenarioSet& scenarios,
                      const SweepSpec& spec, bool include_timing = true);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gridforge

#endif
