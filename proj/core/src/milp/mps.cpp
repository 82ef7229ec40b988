#include "gridforge/milp/mps.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gridforge::milp {

namespace {

// Shortest round-trip decimal form: deterministic bytes, exact re-parse.
std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string sanitize(const std::string& name) {
  std::string token;
  token.reserve(name.size());
  for (char c : name) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '.';
    token.push_back(ok ? c : '_');
  }
  if (token.empty()) token = "_";
  if (token[0] >= '0' && token[0] <= '9') token.insert(token.begin(), 'n');
  return token;
}

// Classic fixed-format field starts (0-based): 1, 4, 14, 24, 39, 49.
void put_field(std::string& line, std::size_t column, const std::string& text) {
  if (line.size() + 1 > column)
    line.push_back(' ');
  else
    line.resize(column, ' ');
  line += text;
}

}  // namespace

std::string export_mps(const MipModel& model, const std::string& model_name) {
  std::vector<std::string> row_names(size_t(model.num_constraints()));
  std::vector<std::string> col_names(size_t(model.num_variables()));
  std::unordered_set<std::string> used;
  used.insert("COST");
  used.insert("RHS");
  used.insert("BND");
  auto claim = [&](const std::string& raw) {
    std::string token = sanitize(raw);
    if (!used.insert(token).second) throw NameCollision(token);
    return token;
  };
  for (int i = 0; i < model.num_constraints(); ++i) row_names[size_t(i)] = claim(model.constraint(i).name);
  for (int j = 0; j < model.num_variables(); ++j) col_names[size_t(j)] = claim(model.variable(j).name);

  std::ostringstream os;
  std::string line;
  auto emit = [&]() {
    os << line << "\n";
    line.clear();
  };

  put_field(line, 0, "NAME");
  put_field(line, 14, sanitize(model_name));
  emit();

  if (model.objective_sense() == Sense::Maximize) {
    put_field(line, 0, "OBJSENSE");
    emit();
    put_field(line, 4, "MAX");
    emit();
  }

  put_field(line, 0, "ROWS");
  emit();
  put_field(line, 1, "N");
  put_field(line, 4, "COST");
  emit();
  for (int i = 0; i < model.num_constraints(); ++i) {
    const Constraint& c = model.constraint(i);
    const char* rel = c.relation == Relation::LessEqual ? "L"
                      : c.relation == Relation::Equal   ? "E"
                                                        : "G";
    put_field(line, 1, rel);
    put_field(line, 4, row_names[size_t(i)]);
    emit();
  }

  // Column-major entries: objective first, then rows in declaration order.
  std::vector<std::vector<std::pair<int, double>>> columns(size_t(model.num_variables()));
  for (int i = 0; i < model.num_constraints(); ++i) {
    std::unordered_map<int, double> merged;
    for (const LinearTerm& t : model.constraint(i).terms) merged[t.var] += t.coeff;
    for (const LinearTerm& t : model.constraint(i).terms) {
      auto it = merged.find(t.var);
      if (it == merged.end()) continue;
      if (it->second != 0.0) columns[size_t(t.var)].emplace_back(i, it->second);
      merged.erase(it);
    }
  }

  put_field(line, 0, "COLUMNS");
  emit();
  bool in_integer_block = false;
  int marker_count = 0;
  auto set_marker = [&](bool integer_block) {
    if (integer_block == in_integer_block) return;
    put_field(line, 4, "MARKER" + std::to_string(marker_count++));
    put_field(line, 14, "'MARKER'");
    put_field(line, 39, integer_block ? "'INTORG'" : "'INTEND'");
    emit();
    in_integer_block = integer_block;
  };
  for (int j = 0; j < model.num_variables(); ++j) {
    set_marker(model.variable(j).type == VarType::Binary);
    bool wrote_any = false;
    double obj = model.objective_coeff(j);
    if (obj != 0.0) {
      put_field(line, 4, col_names[size_t(j)]);
      put_field(line, 14, "COST");
      put_field(line, 24, format_number(obj));
      emit();
      wrote_any = true;
    }
    for (const auto& [row, coeff] : columns[size_t(j)]) {
      put_field(line, 4, col_names[size_t(j)]);
      put_field(line, 14, row_names[size_t(row)]);
      put_field(line, 24, format_number(coeff));
      emit();
      wrote_any = true;
    }
    if (!wrote_any) {
      // Every column must appear at least once.
      put_field(line, 4, col_names[size_t(j)]);
      put_field(line, 14, "COST");
      put_field(line, 24, "0");
      emit();
    }
  }
  set_marker(false);

  put_field(line, 0, "RHS");
  emit();
  for (int i = 0; i < model.num_constraints(); ++i) {
    double rhs = model.constraint(i).rhs;
    if (rhs == 0.0) continue;
    put_field(line, 4, "RHS");
    put_field(line, 14, row_names[size_t(i)]);
    put_field(line, 24, format_number(rhs));
    emit();
  }

  put_field(line, 0, "BOUNDS");
  emit();
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    auto bound_line = [&](const char* kind, bool with_value, double value) {
      put_field(line, 1, kind);
      put_field(line, 4, "BND");
      put_field(line, 14, col_names[size_t(j)]);
      if (with_value) put_field(line, 24, format_number(value));
      emit();
    };
    if (v.type == VarType::Binary) {
      if (v.lower == v.upper)
        bound_line("FX", true, v.lower);
      else
        bound_line("BV", false, 0.0);
      continue;
    }
    bool lo_finite = std::isfinite(v.lower);
    bool up_finite = std::isfinite(v.upper);
    if (lo_finite && up_finite && v.lower == v.upper) {
      bound_line("FX", true, v.lower);
      continue;
    }
    if (!lo_finite && !up_finite) {
      bound_line("FR", false, 0.0);
      continue;
    }
    if (!lo_finite)
      bound_line("MI", false, 0.0);
    else if (v.lower != 0.0)
      bound_line("LO", true, v.lower);
    if (up_finite) bound_line("UP", true, v.upper);
  }

  put_field(line, 0, "ENDATA");
  emit();
  return os.str();
}

std::vector<std::pair<std::string, double>> parse_solution_file(const std::string& text) {
  std::vector<std::pair<std::string, double>> pairs;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string name;
    if (!(ls >> name)) continue;  // blank line
    double value = 0.0;
    if (!(ls >> value))
      throw ParseError("solution file line " + std::to_string(line_no),
                       "expected 'name value'");
    std::string extra;
    if (ls >> extra)
      throw ParseError("solution file line " + std::to_string(line_no),
                       "trailing token '" + extra + "'");
    pairs.emplace_back(name, value);
  }
  return pairs;
}

std::vector<double> assignment_from_pairs(
    const MipModel& model, const std::vector<std::pair<std::string, double>>& pairs) {
  std::vector<double> assignment(size_t(model.num_variables()), 0.0);
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    assignment[size_t(j)] = std::isfinite(v.lower) ? v.lower : 0.0;
  }
  for (const auto& [name, value] : pairs) {
    int idx = model.find_variable(name);
    if (idx < 0) throw UnknownVariable(name);
    assignment[size_t(idx)] = value;
  }
  return assignment;
}

}  // namespace gridforge::milp
