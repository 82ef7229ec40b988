#include "gridforge/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gridforge {

namespace {

using ordered_json = nlohmann::ordered_json;

PhaseSet phases_from_string(const std::string& s, const std::string& context) {
  PhaseSet set;
  for (char c : s) {
    switch (c) {
      case 'A': set.add(Phase::A); break;
      case 'B': set.add(Phase::B); break;
      case 'C': set.add(Phase::C); break;
      default: throw ParseError(context, std::string("unknown phase '") + c + "'");
    }
  }
  return set;
}

PerPhase per_phase_from_json(const ordered_json& j, const std::string& context) {
  PerPhase v = zero_phases();
  if (j.is_null()) return v;
  if (!j.is_object()) throw ParseError(context, "expected an object keyed by phase");
  for (auto it = j.begin(); it != j.end(); ++it) {
    PhaseSet p = phases_from_string(it.key(), context);
    for (Phase ph : kAllPhases)
      if (p.contains(ph)) v[static_cast<int>(ph)] = it.value().get<double>();
  }
  return v;
}

ordered_json per_phase_to_json(const PerPhase& v, PhaseSet phases) {
  ordered_json j = ordered_json::object();
  for (Phase p : kAllPhases)
    if (phases.contains(p) && v[static_cast<int>(p)] != 0.0)
      j[std::string(1, phase_char(p))] = v[static_cast<int>(p)];
  return j;
}

void check_schema_version(const ordered_json& j, const std::string& context) {
  if (!j.contains("schema_version")) throw ParseError(context, "missing schema_version");
  int version = j.at("schema_version").get<int>();
  if (version != kSchemaVersion) throw SchemaVersionMismatch(version, kSchemaVersion);
}

template <typename T>
T field(const ordered_json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) throw ParseError(context, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(context, std::string("bad field '") + key + "': " + e.what());
  }
}

template <typename T>
T field_or(const ordered_json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

ScenarioSet scenarios_from_json(const ordered_json& j, const std::string& context);
ordered_json scenarios_to_json_value(const ScenarioSet& scenarios);

NetworkInstance instance_from_json(const ordered_json& j) {
  check_schema_version(j, "instance");
  NetworkInstance instance;
  if (j.contains("parameters")) {
    const ordered_json& p = j.at("parameters");
    instance.critical_fraction = field_or(p, "critical_fraction", kDefaultCriticalFraction);
    instance.total_fraction = field_or(p, "total_fraction", kDefaultTotalFraction);
  }
  if (!j.contains("buses")) throw ParseError("instance", "missing section 'buses'");
  for (const ordered_json& bj : j.at("buses")) {
    Bus bus;
    bus.id = field<std::string>(bj, "id", "bus");
    const std::string ctx = "bus " + bus.id;
    bus.phases = phases_from_string(field<std::string>(bj, "phases", ctx), ctx);
    bus.is_critical = field_or(bj, "is_critical", false);
    if (bj.contains("load_blocks")) {
      for (const ordered_json& lj : bj.at("load_blocks")) {
        LoadBlock block;
        block.demand = per_phase_from_json(lj.contains("demand") ? lj.at("demand") : ordered_json(),
                                           ctx + " load block");
        bus.load_blocks.push_back(block);
      }
    }
    if (bj.contains("generation") && !bj.at("generation").is_null()) {
      const ordered_json& gj = bj.at("generation");
      GenerationSite site;
      site.existing_capacity =
          per_phase_from_json(gj.contains("existing_capacity") ? gj.at("existing_capacity")
                                                               : ordered_json(),
                              ctx + " generation");
      site.max_new_capacity =
          per_phase_from_json(gj.contains("max_new_capacity") ? gj.at("max_new_capacity")
                                                              : ordered_json(),
                              ctx + " generation");
      site.facility_cost = field_or(gj, "facility_cost", 0.0);
      site.capacity_cost = per_phase_from_json(
          gj.contains("capacity_cost") ? gj.at("capacity_cost") : ordered_json(),
          ctx + " generation");
      bus.generation = site;
    }
    instance.buses.push_back(std::move(bus));
  }
  if (!j.contains("edges")) throw ParseError("instance", "missing section 'edges'");
  for (const ordered_json& ej : j.at("edges")) {
    Edge edge;
    edge.id = field<std::string>(ej, "id", "edge");
    const std::string ctx = "edge " + edge.id;
    edge.from = field<std::string>(ej, "from", ctx);
    edge.to = field<std::string>(ej, "to", ctx);
    edge.phases = phases_from_string(field<std::string>(ej, "phases", ctx), ctx);
    edge.capacity = per_phase_from_json(ej.contains("capacity") ? ej.at("capacity") : ordered_json(), ctx);
    edge.length_miles = field_or(ej, "length_miles", 0.0);
    edge.is_transformer = field_or(ej, "is_transformer", false);
    edge.phase_imbalance_limit = field_or(
        ej, "phase_imbalance_limit",
        edge.is_transformer ? kTransformerImbalanceLimit : kLineImbalanceLimit);
    edge.exists = field_or(ej, "exists", false);
    edge.has_existing_switch = field_or(ej, "has_existing_switch", false);
    edge.hardenable = field_or(ej, "hardenable", false);
    edge.build_cost = field_or(ej, "build_cost", 0.0);
    edge.switch_cost = field_or(ej, "switch_cost", 0.0);
    edge.harden_cost = field_or(ej, "harden_cost", 0.0);
    instance.edges.push_back(std::move(edge));
  }
  return instance;
}

ordered_json instance_to_json_value(const NetworkInstance& instance) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["parameters"] = {{"critical_fraction", instance.critical_fraction},
                     {"total_fraction", instance.total_fraction}};
  ordered_json buses = ordered_json::array();
  for (const Bus& bus : instance.buses) {
    ordered_json bj;
    bj["id"] = bus.id;
    bj["phases"] = bus.phases.to_string();
    bj["is_critical"] = bus.is_critical;
    if (!bus.load_blocks.empty()) {
      ordered_json blocks = ordered_json::array();
      for (const LoadBlock& block : bus.load_blocks)
        blocks.push_back({{"demand", per_phase_to_json(block.demand, bus.phases)}});
      bj["load_blocks"] = blocks;
    }
    if (bus.generation) {
      const GenerationSite& site = *bus.generation;
      ordered_json gj;
      gj["existing_capacity"] = per_phase_to_json(site.existing_capacity, bus.phases);
      gj["max_new_capacity"] = per_phase_to_json(site.max_new_capacity, bus.phases);
      gj["facility_cost"] = site.facility_cost;
      gj["capacity_cost"] = per_phase_to_json(site.capacity_cost, bus.phases);
      bj["generation"] = gj;
    }
    buses.push_back(std::move(bj));
  }
  j["buses"] = buses;
  ordered_json edges = ordered_json::array();
  for (const Edge& edge : instance.edges) {
    ordered_json ej;
    ej["id"] = edge.id;
    ej["from"] = edge.from;
    ej["to"] = edge.to;
    ej["phases"] = edge.phases.to_string();
    ej["capacity"] = per_phase_to_json(edge.capacity, edge.phases);
    ej["length_miles"] = edge.length_miles;
    ej["is_transformer"] = edge.is_transformer;
    ej["phase_imbalance_limit"] = edge.phase_imbalance_limit;
    ej["exists"] = edge.exists;
    ej["has_existing_switch"] = edge.has_existing_switch;
    ej["hardenable"] = edge.hardenable;
    ej["build_cost"] = edge.build_cost;
    ej["switch_cost"] = edge.switch_cost;
    ej["harden_cost"] = edge.harden_cost;
    edges.push_back(std::move(ej));
  }
  j["edges"] = edges;
  return j;
}

ScenarioSet scenarios_from_json(const ordered_json& j, const std::string& context) {
  check_schema_version(j, context);
  ScenarioSet set;
  if (j.contains("source_model") && !j.at("source_model").is_null()) {
    const ordered_json& mj = j.at("source_model");
    DamageModel model;
    model.per_mile_probability = field<double>(mj, "per_mile_probability", context);
    model.hardened_rate_ratio = field<double>(mj, "hardened_rate_ratio", context);
    model.rng_seed = field<uint64_t>(mj, "rng_seed", context);
    set.source_model = model;
  }
  set.rng_algorithm = field_or<std::string>(j, "rng_algorithm", "");
  if (!j.contains("scenarios")) throw ParseError(context, "missing section 'scenarios'");
  int expected = 0;
  for (const ordered_json& sj : j.at("scenarios")) {
    Scenario s;
    s.id = field<int>(sj, "id", context);
    if (s.id != expected++)
      throw ParseError(context, "scenario ids must be 0..n-1 in order");
    s.damaged_edges = field_or(sj, "damaged_edges", std::vector<std::string>{});
    s.hardened_damaged_edges = field_or(sj, "hardened_damaged_edges", std::vector<std::string>{});
    std::sort(s.damaged_edges.begin(), s.damaged_edges.end());
    std::sort(s.hardened_damaged_edges.begin(), s.hardened_damaged_edges.end());
    for (const std::string& id : s.hardened_damaged_edges)
      if (!s.damages(id))
        throw ParseError(context, "hardened_damaged_edges must be a subset of damaged_edges");
    set.scenarios.push_back(std::move(s));
  }
  return set;
}

ordered_json scenarios_to_json_value(const ScenarioSet& scenarios) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  if (scenarios.source_model) {
    j["source_model"] = {{"per_mile_probability", scenarios.source_model->per_mile_probability},
                         {"hardened_rate_ratio", scenarios.source_model->hardened_rate_ratio},
                         {"rng_seed", scenarios.source_model->rng_seed}};
  } else {
    j["source_model"] = nullptr;
  }
  j["rng_algorithm"] = scenarios.rng_algorithm;
  ordered_json arr = ordered_json::array();
  for (const Scenario& s : scenarios.scenarios) {
    arr.push_back({{"id", s.id},
                   {"damaged_edges", s.damaged_edges},
                   {"hardened_damaged_edges", s.hardened_damaged_edges}});
  }
  j["scenarios"] = arr;
  return j;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

NetworkInstance parse_instance_json(const std::string& text,
                                    std::optional<ScenarioSet>* embedded) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("instance file", e.what());
  }
  NetworkInstance instance = instance_from_json(j);
  ValidationReport report = validate_instance(instance);
  if (!report.ok()) {
    std::string msg = "instance fails validation (" + std::to_string(report.issues.size()) +
                      " issue(s)); first: " + report.issues.front().subject + ": " +
                      report.issues.front().message;
    throw ParseError("instance file", msg);
  }
  if (embedded) {
    embedded->reset();
    if (j.contains("scenarios") && !j.at("scenarios").is_null())
      *embedded = scenarios_from_json(j.at("scenarios"), "embedded scenarios");
  }
  return instance;
}

NetworkInstance load_instance(const std::string& path, std::optional<ScenarioSet>* embedded) {
  return parse_instance_json(read_text_file(path), embedded);
}

std::string instance_to_json(const NetworkInstance& instance) {
  return instance_to_json_value(instance).dump(2) + "\n";
}

void save_instance(const NetworkInstance& instance, const std::string& path) {
  write_text_file(path, instance_to_json(instance));
}

ScenarioSet parse_scenarios_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scenario file", e.what());
  }
  return scenarios_from_json(j, "scenario file");
}

ScenarioSet load_scenarios(const std::string& path) {
  return parse_scenarios_json(read_text_file(path));
}

std::string scenarios_to_json(const ScenarioSet& scenarios) {
  return scenarios_to_json_value(scenarios).dump(2) + "\n";
}

void save_scenarios(const ScenarioSet& scenarios, const std::string& path) {
  write_text_file(path, scenarios_to_json(scenarios));
}

Design load_design(const std::string& path, const NetworkInstance& instance) {
  ordered_json j;
  try {
    j = ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("design file", e.what());
  }
  check_schema_version(j, "design file");
  InstanceIndex index = make_index(instance);
  Design design = Design::empty_for(instance);
  auto edge_index = [&](const std::string& id) {
    auto it = index.edge.find(id);
    if (it == index.edge.end()) throw ParseError("design file", "unknown edge id '" + id + "'");
    return it->second;
  };
  auto bus_index = [&](const std::string& id) {
    auto it = index.bus.find(id);
    if (it == index.bus.end()) throw ParseError("design file", "unknown bus id '" + id + "'");
    return it->second;
  };
  for (const std::string& id : field_or(j, "line_built", std::vector<std::string>{}))
    design.line_built[size_t(edge_index(id))] = 1;
  for (const std::string& id : field_or(j, "switch_built", std::vector<std::string>{}))
    design.switch_built[size_t(edge_index(id))] = 1;
  for (const std::string& id : field_or(j, "hardened", std::vector<std::string>{}))
    design.hardened[size_t(edge_index(id))] = 1;
  for (const std::string& id : field_or(j, "facility_built", std::vector<std::string>{}))
    design.facility_built[size_t(bus_index(id))] = 1;
  if (j.contains("new_capacity")) {
    for (auto it = j.at("new_capacity").begin(); it != j.at("new_capacity").end(); ++it) {
      int b = bus_index(it.key());
      design.new_capacity[size_t(b)] = per_phase_from_json(it.value(), "design new_capacity");
    }
  }
  std::vector<std::string> issues = validate_design(instance, design);
  if (!issues.empty()) throw ParseError("design file", issues.front());
  return design;
}

namespace {

ordered_json design_to_json_value(const NetworkInstance& instance, const Design& design) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  std::vector<std::string> lines, switches, hardened, facilities;
  for (std::size_t e = 0; e < instance.edges.size(); ++e) {
    const Edge& edge = instance.edges[e];
    if (design.line_built[e] && !edge.exists) lines.push_back(edge.id);
    if (design.switch_built[e] && !edge.has_existing_switch) switches.push_back(edge.id);
    if (design.hardened[e]) hardened.push_back(edge.id);
  }
  ordered_json caps = ordered_json::object();
  for (std::size_t b = 0; b < instance.buses.size(); ++b) {
    if (design.facility_built[b]) facilities.push_back(instance.buses[b].id);
    if (phase_sum(design.new_capacity[b]) > 0.0)
      caps[instance.buses[b].id] =
          per_phase_to_json(design.new_capacity[b], instance.buses[b].phases);
  }
  j["line_built"] = lines;
  j["switch_built"] = switches;
  j["hardened"] = hardened;
  j["facility_built"] = facilities;
  j["new_capacity"] = caps;
  return j;
}

}  // namespace

std::string design_to_json(const NetworkInstance& instance, const Design& design) {
  return design_to_json_value(instance, design).dump(2) + "\n";
}

std::string report_to_json(const NetworkInstance& instance, const SolveReport& report,
                           bool include_timing) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["algorithm"] = report.algorithm;
  j["status"] = to_string(report.status);
  j["objective"] = report.objective;
  j["bound"] = report.bound;
  j["master_solves"] = report.master_solves;
  j["pricing_solves"] = report.pricing_solves;
  if (include_timing) j["wall_time_seconds"] = report.wall_time_seconds;
  if (!report.design.line_built.empty())
    j["design"] = ordered_json::parse(design_to_json(instance, report.design));
  ordered_json per = ordered_json::array();
  for (std::size_t s = 0; s < report.per_scenario.size(); ++s) {
    const PricingResult& pr = report.per_scenario[s];
    per.push_back({{"scenario", int(s)},
                   {"l_value", pr.l_value},
                   {"critical_fraction", pr.served_critical_fraction},
                   {"total_fraction", pr.served_total_fraction}});
  }
  j["per_scenario"] = per;
  if (!report.chance_excused.empty()) {
    ordered_json z = ordered_json::array();
    for (uint8_t v : report.chance_excused) z.push_back(int(v));
    j["chance_excused"] = z;
  }
  ordered_json trace = ordered_json::array();
  for (const TraceEvent& e : report.trace) {
    trace.push_back({{"event", e.event},
                     {"step", e.step},
                     {"scenario", e.scenario},
                     {"k", e.k},
                     {"value", e.value},
                     {"objective", e.objective}});
  }
  j["trace"] = trace;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const SolveReport& report, bool include_timing) {
  std::ostringstream os;
  os << "row_type,scenario,objective,cpu_seconds,status,l_value,critical_fraction,total_fraction\n";
  ordered_json num;  // reuse nlohmann's double formatting for byte stability
  auto fmt = [&](double v) {
    num = v;
    return num.dump();
  };
  for (std::size_t s = 0; s < report.per_scenario.size(); ++s) {
    const PricingResult& pr = report.per_scenario[s];
    os << "pricing," << s << ",,,," << fmt(pr.l_value) << "," << fmt(pr.served_critical_fraction)
       << "," << fmt(pr.served_total_fraction) << "\n";
  }
  os << "summary,," << fmt(report.objective) << ","
     << (include_timing ? fmt(report.wall_time_seconds) : std::string()) << ","
     << to_string(report.status) << ",,,\n";
  return os.str();
}

void save_results(const NetworkInstance& instance, const SolveReport& report,
                  const std::string& json_path, bool include_timing) {
  write_text_file(json_path, report_to_json(instance, report, include_timing));
  std::string csv_path = json_path;
  auto dot = csv_path.find_last_of('.');
  auto slash = csv_path.find_last_of("/\\");
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    csv_path.resize(dot);
  csv_path += ".csv";
  write_text_file(csv_path, report_to_csv(report, include_timing));
}

}  // namespace gridforge
