#include <doctest.h>

#include <cmath>

#include "gridforge/milp/solve.hpp"
#include "support/oracles.hpp"

using namespace gridforge::milp;

// max 3a + 4b + 5c s.t. 2a + 3b + 4c <= 5, binaries. Exhaustive enumeration
// of the 8 assignments gives 7 at (1,1,0).
TEST_CASE("small knapsack matches enumeration") {
  MipModel m;
  int a = m.add_binary("a");
  int b = m.add_binary("b");
  int c = m.add_binary("c");
  m.add_constraint("w", {{a, 2.0}, {b, 3.0}, {c, 4.0}}, Relation::LessEqual, 5.0);
  m.set_objective_sense(Sense::Maximize);
  m.set_objective_coeff(a, 3.0);
  m.set_objective_coeff(b, 4.0);
  m.set_objective_coeff(c, 5.0);

  auto oracle = gridforge::testing::enumerate_mip(m);
  REQUIRE(oracle.has_value());
  CHECK(*oracle == doctest::Approx(7.0));

  MipSolution sol = solve_mip(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(7.0));
  CHECK(sol.assignment[size_t(a)] == doctest::Approx(1.0));
  CHECK(sol.assignment[size_t(b)] == doctest::Approx(1.0));
  CHECK(sol.assignment[size_t(c)] == doctest::Approx(0.0));
}

TEST_CASE("integral relaxation solves at the root") {
  MipModel m;
  int a = m.add_binary("a");
  int b = m.add_binary("b");
  m.add_constraint("c1", {{a, 1.0}}, Relation::LessEqual, 0.0);
  m.add_constraint("c2", {{b, 1.0}}, Relation::GreaterEqual, 1.0);
  m.set_objective_coeff(a, 1.0);
  m.set_objective_coeff(b, 2.0);
  MipSolution sol = solve_mip(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.node_count == 1);
  CHECK(sol.objective_value == doctest::Approx(2.0));
}

TEST_CASE("binary squeezed between fractional bounds is infeasible") {
  MipModel m;
  int x = m.add_binary("x");
  m.add_constraint("lo", {{x, 1.0}}, Relation::GreaterEqual, 0.3);
  m.add_constraint("hi", {{x, 1.0}}, Relation::LessEqual, 0.7);
  MipSolution sol = solve_mip(m);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("fix_assignment pins bounds") {
  MipModel m;
  int x = m.add_binary("x");
  int z = m.add_continuous("z", 0.0, 10.0);
  m.add_constraint("c", {{x, 3.0}, {z, 1.0}}, Relation::LessEqual, 8.0);
  m.set_objective_sense(Sense::Maximize);
  m.set_objective_coeff(x, 1.0);
  m.set_objective_coeff(z, 1.0);

  MipModel fixed = fix_assignment(m, {{"x", 1.0}});
  CHECK(fixed.variable(x).lower == 1.0);
  CHECK(fixed.variable(x).upper == 1.0);

  MipModel fixed_z = fix_assignment(m, {{"z", 2.5}});
  CHECK(fixed_z.variable(z).lower == 2.5);
  CHECK(fixed_z.variable(z).upper == 2.5);

  CHECK_THROWS_AS((void)fix_assignment(m, {{"nope", 1.0}}), gridforge::UnknownVariable);
  CHECK_THROWS_AS((void)fix_assignment(m, {{"z", 11.0}}), gridforge::ValueOutOfBounds);
}

TEST_CASE("fixing equals adding an equality constraint on random models") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    MipModel m = gridforge::testing::random_mip(seed, 3, true);
    MipModel by_bounds = fix_assignment(m, {{"b0", 1.0}});
    MipModel by_row = m;
    by_row.add_constraint("pin", {{0, 1.0}}, Relation::Equal, 1.0);
    MipSolution a = solve_mip(by_bounds);
    MipSolution b = solve_mip(by_row);
    REQUIRE(a.status == b.status);
    if (a.status == SolveStatus::Optimal)
      CHECK(a.objective_value == doctest::Approx(b.objective_value).epsilon(1e-9));
  }
}

TEST_CASE("random mixed models match exhaustive enumeration") {
  int optimal = 0;
  for (uint64_t seed = 0; seed < 80; ++seed) {
    MipModel m = gridforge::testing::random_mip(seed, 3 + int(seed % 4), seed % 3 == 0);
    auto oracle = gridforge::testing::enumerate_mip(m);
    MipSolution sol = solve_mip(m);
    if (!oracle.has_value()) {
      CHECK(sol.status == SolveStatus::Infeasible);
      continue;
    }
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(*oracle).epsilon(1e-7));
    ++optimal;
  }
  CHECK(optimal > 40);
}

TEST_CASE("weak duality holds along the recorded trace") {
  MipModel m = gridforge::testing::random_mip(7, 6, false);
  SolveParams params;
  params.record_trace = true;
  MipSolution sol = solve_mip(m, params);
  const bool maximize = m.objective_sense() == Sense::Maximize;
  for (const NodeTraceEntry& entry : sol.trace) {
    if (!std::isfinite(entry.incumbent)) continue;
    if (maximize)
      CHECK(entry.global_bound >= entry.incumbent - 1e-9);
    else
      CHECK(entry.global_bound <= entry.incumbent + 1e-9);
  }
}

TEST_CASE("identical solves produce identical solution bytes") {
  MipModel m = gridforge::testing::random_mip(11, 8, true);
  MipSolution a = solve_mip(m);
  MipSolution b = solve_mip(m);
  REQUIRE(a.status == b.status);
  REQUIRE(a.assignment.size() == b.assignment.size());
  for (std::size_t i = 0; i < a.assignment.size(); ++i) CHECK(a.assignment[i] == b.assignment[i]);
  CHECK(a.node_count == b.node_count);
}

TEST_CASE("cutoff prunes solutions at or above it") {
  MipModel m;
  int a = m.add_binary("a");
  m.set_objective_coeff(a, 1.0);
  m.add_constraint("c", {{a, 1.0}}, Relation::GreaterEqual, 1.0);  // optimum 1
  SolveParams params;
  params.cutoff = 1.0;
  MipSolution sol = solve_mip(m, params);
  CHECK(sol.status == SolveStatus::Infeasible);  // nothing strictly below 1
  params.cutoff = 1.5;
  sol = solve_mip(m, params);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(1.0));
}
