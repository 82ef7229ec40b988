#include <doctest.h>

#include "gridforge/milp/solve.hpp"
#include "support/oracles.hpp"

using namespace gridforge::milp;

TEST_CASE("single bound binds") {
  MipModel m;
  int x = m.add_continuous("x", 0.0, kInfinity);
  m.add_constraint("c", {{x, 1.0}}, Relation::LessEqual, 1.0);
  m.set_objective_sense(Sense::Maximize);
  m.set_objective_coeff(x, 1.0);
  MipSolution sol = solve_lp(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(1.0));
  CHECK(sol.assignment[size_t(x)] == doctest::Approx(1.0));
}

TEST_CASE("degenerate optimum set still reports the optimal value") {
  MipModel m;
  int x = m.add_continuous("x", 0.0, kInfinity);
  int y = m.add_continuous("y", 0.0, kInfinity);
  m.add_constraint("c", {{x, 1.0}, {y, 1.0}}, Relation::LessEqual, 1.0);
  m.set_objective_sense(Sense::Maximize);
  m.set_objective_coeff(x, 1.0);
  m.set_objective_coeff(y, 1.0);
  MipSolution sol = solve_lp(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(1.0));
}

// min 3x + 2y, x + y >= 4, x - y <= 2, x,y >= 0. The vertex oracle puts the
// optimum at (0, 4) with objective 8.
TEST_CASE("two-constraint minimum agrees with the vertex oracle") {
  MipModel m;
  int x = m.add_continuous("x", 0.0, kInfinity);
  int y = m.add_continuous("y", 0.0, kInfinity);
  m.add_constraint("c1", {{x, 1.0}, {y, 1.0}}, Relation::GreaterEqual, 4.0);
  m.add_constraint("c2", {{x, 1.0}, {y, -1.0}}, Relation::LessEqual, 2.0);
  m.set_objective_coeff(x, 3.0);
  m.set_objective_coeff(y, 2.0);

  auto oracle = gridforge::testing::enumerate_lp_vertices(m);
  REQUIRE(oracle.has_value());
  CHECK(oracle->objective == doctest::Approx(8.0));
  CHECK(oracle->point[0] == doctest::Approx(0.0));
  CHECK(oracle->point[1] == doctest::Approx(4.0));

  MipSolution sol = solve_lp(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(oracle->objective));
  CHECK(sol.assignment[0] == doctest::Approx(0.0));
  CHECK(sol.assignment[1] == doctest::Approx(4.0));
}

TEST_CASE("infeasible rows are detected") {
  MipModel m;
  int x = m.add_continuous("x", 0.0, 1.0);
  m.add_constraint("c", {{x, 1.0}}, Relation::GreaterEqual, 2.0);
  MipSolution sol = solve_lp(m);
  CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("unbounded rays are detected") {
  MipModel m;
  int x = m.add_continuous("x", 0.0, kInfinity);
  m.set_objective_sense(Sense::Maximize);
  m.set_objective_coeff(x, 1.0);
  MipSolution sol = solve_lp(m);
  CHECK(sol.status == SolveStatus::Unbounded);
}

TEST_CASE("negative lower bounds and equalities") {
  MipModel m;
  int x = m.add_continuous("x", -5.0, 5.0);
  int y = m.add_continuous("y", -kInfinity, kInfinity);
  m.add_constraint("c1", {{x, 1.0}, {y, 1.0}}, Relation::Equal, 1.0);
  m.set_objective_coeff(x, 1.0);
  m.set_objective_coeff(y, 2.0);
  // min x + 2y with y = 1 - x: min x + 2 - 2x = 2 - x -> x = 5, y = -4.
  MipSolution sol = solve_lp(m);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective_value == doctest::Approx(-3.0));
  CHECK(sol.assignment[0] == doctest::Approx(5.0));
  CHECK(sol.assignment[1] == doctest::Approx(-4.0));
}

TEST_CASE("random small LPs agree with vertex enumeration") {
  int checked = 0;
  for (uint64_t seed = 0; seed < 60; ++seed) {
    MipModel m = gridforge::testing::random_lp(seed);
    auto oracle = gridforge::testing::enumerate_lp_vertices(m);
    MipSolution sol = solve_lp(m);
    if (!oracle.has_value()) continue;  // infeasible or unbounded per oracle
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(oracle->objective).epsilon(1e-6));
    ++checked;
  }
  CHECK(checked > 20);
}
