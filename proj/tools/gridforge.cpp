// gridforge: design minimum-cost upgrades so a distribution grid keeps
// serving critical load across sampled disaster scenarios.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gridforge/io.hpp"
#include "gridforge/milp/mps.hpp"

namespace gf = gridforge;

namespace {

struct CommonSolveOptions {
  std::string instance_path;
  std::string scenario_path;
  std::string algorithm = "extensive";
  std::optional<double> epsilon;
  std::optional<double> lambda;
  std::optional<double> gamma;
  double time_limit = 1e18;
  uint64_t seed = 0;
  bool no_timing = false;
};

gf::ScenarioSet load_scenarios_or_embedded(const std::string& scenario_path,
                                           const std::string& instance_path,
                                           const gf::NetworkInstance& instance) {
  (void)instance;
  if (!scenario_path.empty()) return gf::load_scenarios(scenario_path);
  std::optional<gf::ScenarioSet> embedded;
  gf::load_instance(instance_path, &embedded);
  if (embedded) return *embedded;
  throw gf::Error("no scenario file given and the instance embeds none");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient distribution grid upgrade planning"};
  app.require_subcommand(1);

  // generate
  std::string gen_profile = "urban";
  int gen_feeders = 3;
  int gen_buses = 5;
  uint64_t gen_seed = 0;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic instance");
  generate->add_option("--profile", gen_profile, "urban or rural")
      ->check(CLI::IsMember({"urban", "rural"}));
  generate->add_option("--feeders", gen_feeders, "number of feeders")->required();
  generate->add_option("--buses-per-feeder", gen_buses, "buses per feeder")->required();
  generate->add_option("--seed", gen_seed, "rng seed");
  generate->add_option("-o,--output", gen_out, "output instance JSON")->required();

  // scenarios
  double sc_per_mile = 0.1;
  double sc_ratio = 0.0;
  int sc_count = gf::kDefaultScenarioCount;
  uint64_t sc_seed = 0;
  std::string sc_instance, sc_out;
  auto* scenarios_cmd = app.add_subcommand("scenarios", "Sample damage scenarios");
  scenarios_cmd->add_option("--per-mile", sc_per_mile, "per-mile damage probability")->required();
  scenarios_cmd->add_option("--hardened-ratio", sc_ratio, "hardened damage rate ratio");
  scenarios_cmd->add_option("--count", sc_count, "number of scenarios");
  scenarios_cmd->add_option("--seed", sc_seed, "rng seed");
  scenarios_cmd->add_option("-i,--instance", sc_instance, "instance JSON")->required();
  scenarios_cmd->add_option("-o,--output", sc_out, "output scenario JSON")->required();

  // solve
  CommonSolveOptions so;
  std::string solve_out;
  auto* solve = app.add_subcommand("solve", "Solve the upgrade design problem");
  solve->add_option("--algorithm", so.algorithm, "extensive|sbd|greedy|vns|sbvnds")
      ->check(CLI::IsMember({"extensive", "sbd", "greedy", "vns", "sbvnds"}));
  solve->add_option("--epsilon", so.epsilon, "chance-constraint fraction");
  solve->add_option("--lambda", so.lambda, "critical load fraction override");
  solve->add_option("--gamma", so.gamma, "total load fraction override");
  solve->add_option("--time-limit", so.time_limit, "time limit in seconds");
  solve->add_option("--seed", so.seed, "vns shuffle seed");
  solve->add_flag("--no-timing", so.no_timing, "omit timing fields for reproducible bytes");
  solve->add_option("-i,--instance", so.instance_path, "instance JSON")->required();
  solve->add_option("-s,--scenarios", so.scenario_path, "scenario JSON");
  solve->add_option("-o,--output", solve_out, "output report JSON (CSV written alongside)")
      ->required();

  // evaluate
  std::string ev_instance, ev_scenarios, ev_design, ev_out;
  auto* evaluate = app.add_subcommand("evaluate", "Price a design against scenarios");
  evaluate->add_option("-i,--instance", ev_instance, "instance JSON")->required();
  evaluate->add_option("-s,--scenarios", ev_scenarios, "scenario JSON");
  evaluate->add_option("-d,--design", ev_design, "design JSON")->required();
  evaluate->add_option("-o,--output", ev_out, "optional output JSON");

  // sweep
  std::string sw_param = "lambda";
  std::string sw_grid;
  std::string sw_algorithm = "extensive";
  std::string sw_instance, sw_scenarios, sw_out;
  uint64_t sw_seed = 0;
  int sw_count = gf::kDefaultScenarioCount;
  double sw_ratio = 0.0;
  double sw_time_limit = 1e18;
  bool sw_no_timing = false;
  auto* sweep = app.add_subcommand("sweep", "Sensitivity sweep producing CSV");
  sweep->add_option("--param", sw_param, "lambda|epsilon|damage")
      ->check(CLI::IsMember({"lambda", "epsilon", "damage"}));
  sweep->add_option("--grid", sw_grid, "comma-separated increasing values")->required();
  sweep->add_option("--algorithm", sw_algorithm, "solver to run per grid point");
  sweep->add_option("--seed", sw_seed, "scenario seed for damage sweeps");
  sweep->add_option("--count", sw_count, "scenario count for damage sweeps");
  sweep->add_option("--hardened-ratio", sw_ratio, "hardened ratio for damage sweeps");
  sweep->add_option("--time-limit", sw_time_limit, "per-point time limit in seconds");
  sweep->add_flag("--no-timing", sw_no_timing, "omit cpu column values");
  sweep->add_option("-i,--instance", sw_instance, "instance JSON")->required();
  sweep->add_option("-s,--scenarios", sw_scenarios, "scenario JSON");
  sweep->add_option("-o,--output", sw_out, "output CSV")->required();

  // export-mps
  std::string mps_instance, mps_scenarios, mps_out;
  std::optional<double> mps_epsilon;
  auto* export_mps = app.add_subcommand("export-mps", "Write the extensive model as MPS");
  export_mps->add_option("-i,--instance", mps_instance, "instance JSON")->required();
  export_mps->add_option("-s,--scenarios", mps_scenarios, "scenario JSON");
  export_mps->add_option("--epsilon", mps_epsilon, "chance-constraint fraction");
  export_mps->add_option("-o,--output", mps_out, "output MPS file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      gf::Profile profile = gen_profile == "urban" ? gf::Profile::Urban : gf::Profile::Rural;
      gf::NetworkInstance instance =
          gf::generate_synthetic(profile, gen_feeders, gen_buses, gen_seed);
      gf::save_instance(instance, gen_out);
      std::cout << "wrote " << gen_out << " (" << instance.buses.size() << " buses, "
                << instance.edges.size() << " edges)\n";
    } else if (*scenarios_cmd) {
      gf::NetworkInstance instance = gf::load_instance(sc_instance);
      gf::DamageModel model{sc_per_mile, sc_ratio, sc_seed};
      gf::ScenarioSet set = gf::sample_scenarios(instance, model, sc_count);
      gf::save_scenarios(set, sc_out);
      std::cout << "wrote " << sc_out << " (" << set.size() << " scenarios)\n";
    } else if (*solve) {
      gf::NetworkInstance instance = gf::load_instance(so.instance_path);
      if (so.lambda) instance.critical_fraction = *so.lambda;
      if (so.gamma) instance.total_fraction = *so.gamma;
      gf::ScenarioSet set =
          load_scenarios_or_embedded(so.scenario_path, so.instance_path, instance);
      gf::AlgorithmParams params;
      params.epsilon = so.epsilon;
      params.mip.time_limit_seconds = so.time_limit;
      params.vns.shuffle_seed = so.seed;
      gf::SolveReport report = gf::solve_with_algorithm(so.algorithm, instance, set, params);
      gf::save_results(instance, report, solve_out, !so.no_timing);
      std::cout << "status " << gf::to_string(report.status) << " objective " << report.objective
                << "\n";
      if (report.status == gf::ReportStatus::Infeasible) return 2;
    } else if (*evaluate) {
      gf::NetworkInstance instance = gf::load_instance(ev_instance);
      gf::ScenarioSet set = load_scenarios_or_embedded(ev_scenarios, ev_instance, instance);
      gf::Design design = gf::load_design(ev_design, instance);
      std::vector<gf::PricingResult> results = gf::evaluate_design(instance, set, design);
      std::cout << "scenario,l_value,critical_fraction,total_fraction\n";
      for (std::size_t s = 0; s < results.size(); ++s)
        std::cout << s << "," << results[s].l_value << "," << results[s].served_critical_fraction
                  << "," << results[s].served_total_fraction << "\n";
      if (!ev_out.empty()) {
        gf::SolveReport report;
        report.algorithm = "evaluate";
        report.design = design;
        report.objective = gf::design_cost(instance, design);
        report.per_scenario = results;
        bool ok = true;
        for (const auto& r : results) ok = ok && r.l_value <= gf::kInfeasibilityTolerance;
        report.status = ok ? gf::ReportStatus::Feasible : gf::ReportStatus::Infeasible;
        gf::save_results(instance, report, ev_out, false);
      }
    } else if (*sweep) {
      gf::NetworkInstance instance = gf::load_instance(sw_instance);
      gf::ScenarioSet set;
      if (!sw_scenarios.empty() || sw_param != "damage")
        set = load_scenarios_or_embedded(sw_scenarios, sw_instance, instance);
      gf::SweepSpec spec;
      spec.parameter = sw_param == "lambda"    ? gf::SweepParameter::Lambda
                       : sw_param == "epsilon" ? gf::SweepParameter::Epsilon
                                               : gf::SweepParameter::PerMileProbability;
      for (const auto& token : CLI::detail::split(sw_grid, ','))
        spec.grid.push_back(std::stod(token));
      spec.algorithm = sw_algorithm;
      spec.seed = sw_seed;
      spec.scenario_count = sw_count;
      spec.hardened_ratio = sw_ratio;
      spec.time_limit_seconds = sw_time_limit;
      std::string csv = gf::run_sweep(instance, set, spec, !sw_no_timing);
      gf::write_text_file(sw_out, csv);
      std::cout << "wrote " << sw_out << "\n";
    } else if (*export_mps) {
      gf::NetworkInstance instance = gf::load_instance(mps_instance);
      gf::ScenarioSet set = load_scenarios_or_embedded(mps_scenarios, mps_instance, instance);
      gf::CycleSet cycles = gf::enumerate_cycles(instance);
      gf::MasterModel master = gf::build_master(instance, set, cycles);
      if (mps_epsilon) gf::apply_chance_relaxation(master, *mps_epsilon);
      gf::write_text_file(mps_out, gf::milp::export_mps(master.model));
      std::cout << "wrote " << mps_out << " (" << master.model.num_variables() << " columns, "
                << master.model.num_constraints() << " rows)\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
