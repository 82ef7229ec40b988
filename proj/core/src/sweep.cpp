#include <charconv>
#include <sstream>

#include "gridforge/io.hpp"

namespace gridforge {

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

const char* parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::Lambda: return "lambda";
    case SweepParameter::Epsilon: return "epsilon";
    case SweepParameter::PerMileProbability: return "damage";
  }
  return "?";
}

}  // namespace

std::string run_sweep(const NetworkInstance& instance, const ScenarioSet& scenarios,
                      const SweepSpec& spec, bool include_timing) {
  if (spec.grid.empty()) throw Error("sweep grid must not be empty");
  for (std::size_t i = 1; i < spec.grid.size(); ++i)
    if (!(spec.grid[i] > spec.grid[i - 1])) throw Error("sweep grid must be strictly increasing");
  if (spec.parameter == SweepParameter::Epsilon && spec.algorithm != "extensive")
    throw Error("epsilon sweeps require the extensive algorithm");

  std::ostringstream os;
  os << "parameter,value,objective,cpu_seconds,status\n";

  for (double value : spec.grid) {
    NetworkInstance current = instance;
    ScenarioSet current_scenarios = scenarios;
    AlgorithmParams params;
    params.mip.time_limit_seconds = spec.time_limit_seconds;
    params.record_trace = false;

    switch (spec.parameter) {
      case SweepParameter::Lambda:
        current.critical_fraction = value;
        break;
      case SweepParameter::Epsilon:
        params.epsilon = value;
        break;
      case SweepParameter::PerMileProbability: {
        DamageModel model{value, spec.hardened_ratio, spec.seed};
        current_scenarios = sample_scenarios(current, model, spec.scenario_count);
        break;
      }
    }

    SolveReport report;
    std::string status;
    try {
      report = solve_with_algorithm(spec.algorithm, current, current_scenarios, params);
      status = to_string(report.status);
    } catch (const Error& e) {
      status = "Error";
      (void)e;
    }

    os << parameter_name(spec.parameter) << "," << format_number(value) << ",";
    if (status == "Optimal" || status == "Feasible" || status == "TimeLimit")
      os << format_number(report.objective);
    os << ",";
    if (include_timing) os << format_number(report.wall_time_seconds);
    os << "," << status << "\n";
  }
  return os.str();
}

}  // namespace gridforge
