#ifndef GRIDFORGE_MILP_MPS_HPP
#define GRIDFORGE_MILP_MPS_HPP

#include <string>
#include <utility>
#include <vector>

#include "gridforge/milp/model.hpp"

namespace gridforge::milp {

// Fixed-format MPS text (ROWS/COLUMNS/RHS/BOUNDS with INTORG/INTEND markers,
// one entry per data line, OBJSENSE emitted for maximization). Names are
// sanitized to MPS-legal tokens; a post-sanitization collision throws
// NameCollision. Output is byte-stable for a given model.
std::string export_mps(const MipModel& model, const std::string& model_name = "GRIDFORGE");

// Parses an externally produced solution file: one "name value" pair per
// line, '#' starts a comment. Unknown names throw UnknownVariable.
std::vector<std::pair<std::string, double>> parse_solution_file(const std::string& text);

// Maps parsed pairs onto a model assignment vector (missing variables default
// to their lower bound, or 0 for free variables).
std::vector<double> assignment_from_pairs(const MipModel& model,
                                          const std::vector<std::pair<std::string, double>>& pairs);

}  // namespace gridforge::milp

#endif
