#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "tullock/fixed_prize.hpp"

using namespace tullock;
using namespace tullock::fixed_prize;

namespace {

ContestConfig baseline_config(double nu, int n = 2) {
  return ContestConfig(n, nu, CostDistribution::uniform(1.0, 2.0),
                       EffortTechnology::power(0.5), 7);
}

ContestConfig fey_config() {
  return ContestConfig(2, 1.0, CostDistribution::uniform(0.01, 1.01),
                       EffortTechnology::power(1.0), 7);
}

}  // namespace

TEST_SUITE_BEGIN("fixed-prize");

TEST_CASE("residuals: converged solution, scaling probe, n guard") {
  const auto config = baseline_config(1.0);
  const auto eq = solve_equilibrium(config, 1.0, 100);
  CHECK(eq.residual <= 1e-8);

  const auto at_solution = residuals(eq.grid, eq.xi, eq.v0, config);
  CHECK(numerics::max_abs(at_solution) <= 1e-8);

  // doubling every contribution makes each residual negative for h(xi)=xi^2
  std::vector<double> doubled = eq.xi;
  for (double& x : doubled) x *= 2.0;
  for (double r : residuals(eq.grid, doubled, eq.v0, config)) CHECK(r < 0.0);

  CHECK_THROWS_AS(residuals(eq.grid, eq.xi, eq.v0, baseline_config(1.0, 3)),
                  ValidationError);
  CHECK_THROWS_AS(solve_equilibrium(baseline_config(1.0, 3), 1.0, 50),
                  ValidationError);
}

TEST_CASE("equilibrium grid follows the uniform scheme") {
  const auto eq = solve_equilibrium(baseline_config(1.0), 1.0, 100);
  CHECK(eq.grid.m == 100);
  CHECK(eq.grid.weight == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(eq.grid.points.front() == doctest::Approx(1.0));
  CHECK(eq.grid.points.back() == doctest::Approx(1.99));
}

TEST_CASE("equilibrium strategy decreases and refines consistently") {
  const auto config = baseline_config(1.0);
  const auto eq100 = solve_equilibrium(config, 1.0, 100);
  const auto eq200 = solve_equilibrium(config, 1.0, 200);
  for (std::size_t i = 1; i < eq100.xi.size(); ++i) {
    CHECK(eq100.xi[i] < eq100.xi[i - 1]);
  }
  // shared grid points: c_j(m=100) = c_{2j}(m=200)
  double worst = 0.0;
  for (int j = 0; j < 100; ++j) {
    worst = std::max(worst, std::abs(eq100.xi[j] - eq200.xi[2 * j]));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("warm start reproduces the cold-start solution") {
  const auto config = baseline_config(1.0);
  const auto cold = solve_equilibrium(config, 0.5, 60);
  const auto nearby = solve_equilibrium(config, 0.52, 60);
  const auto warm = solve_equilibrium(config, 0.5, 60, {}, &nearby.xi);
  for (int j = 0; j < 60; ++j) {
    CHECK(std::abs(cold.xi[j] - warm.xi[j]) <= 1e-8);
  }
}

TEST_CASE("Fey replication: linear technology on [0.01, 1.01]") {
  const auto eq = solve_equilibrium(fey_config(), 1.0, 100);
  CHECK(eq.residual < 1e-8);
  for (std::size_t i = 1; i < eq.xi.size(); ++i) CHECK(eq.xi[i] < eq.xi[i - 1]);
  // decreasing and convex: discrete second differences nonnegative
  for (std::size_t i = 2; i < eq.xi.size(); ++i) {
    CHECK(eq.xi[i] - 2.0 * eq.xi[i - 1] + eq.xi[i - 2] >= -1e-10);
  }
}

TEST_CASE("profit estimate signs and magnitudes") {
  const auto config = baseline_config(1.0);
  const auto eq_big = solve_equilibrium(config, 10.0, 60);
  CHECK(profit_estimate(eq_big, 1.0) < 0.0);  // absurdly large prize
  const auto eq = solve_equilibrium(config, 0.09, 100);
  CHECK(profit_estimate(eq, 1.0) == doctest::Approx(0.0853).epsilon(1e-2));
}

TEST_CASE("welfare estimate: triangular closed form on constant input") {
  // all-equal contributions k on a uniform grid: the double sum telescopes to
  // 2 * delta^2 * f * h(k) * m(m+1)/2
  const auto config = baseline_config(1.0);
  const int m = 40;
  FixedPrizeEquilibrium eq;
  eq.grid = numerics::QuadratureGrid::uniform(1.0, 2.0, m);
  const double k = 0.3;
  eq.xi.assign(m, k);
  eq.pdf_at.assign(m, 1.0);
  eq.effort.assign(m, k * k);
  eq.v0 = 1.0;
  const double expected =
      2.0 * eq.grid.weight * eq.grid.weight * k * k * (m * (m + 1) / 2.0);
  CHECK(welfare_estimate(eq) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("optimizer finds an interior peak with coincident prize and profit") {
  const auto config = baseline_config(1.0);
  OptimizeParams params;
  params.v0_lo = 0.02;
  params.v0_hi = 0.4;
  params.v0_step = 0.005;
  params.m = 60;
  const auto sol = optimize(config, params);
  CHECK(sol.v0_star > params.v0_lo);
  CHECK(sol.pi0_star > 0.0);
  CHECK(std::abs(sol.v0_star - sol.pi0_star) <= 0.01);
  // pi0_star is the trajectory maximum
  for (const auto& [v0, profit] : sol.trajectory) CHECK(profit <= sol.pi0_star);
  // unimodal within noise: at most one sign change of the differences
  int changes = 0;
  int sign = 0;
  for (std::size_t i = 1; i < sol.trajectory.size(); ++i) {
    const double d = sol.trajectory[i].second - sol.trajectory[i - 1].second;
    if (std::abs(d) <= 1e-6) continue;
    const int s = d > 0.0 ? 1 : -1;
    if (sign != 0 && s != sign) ++changes;
    sign = s;
  }
  CHECK(changes <= 1);
}

TEST_CASE("optimizer widens the range when the peak is not interior") {
  const auto config = baseline_config(1.0);
  OptimizeParams params;
  params.v0_lo = 0.01;
  params.v0_hi = 0.03;  // peak near 0.085 sits beyond this
  params.v0_step = 0.005;
  params.m = 50;
  const auto sol = optimize(config, params);
  CHECK(sol.v0_star > 0.05);
  CHECK(sol.v0_star < 0.2);
}

TEST_CASE("solver failure carries the prize and grid context") {
  const auto config = baseline_config(1.0);
  numerics::SolverSettings starved;
  starved.max_iter = 1;
  try {
    solve_equilibrium(config, 1.0, 30, starved);
    FAIL("expected SolveError");
  } catch (const numerics::SolveError& e) {
    CHECK(std::string(e.what()).find("V0=") != std::string::npos);
    CHECK(std::string(e.what()).find("m=30") != std::string::npos);
  }
}

TEST_CASE("optimizer errors when the widening budget is exhausted") {
  const auto config = baseline_config(1.0);
  OptimizeParams params;
  params.v0_lo = 0.01;
  params.v0_hi = 0.02;  // peak near 0.085 stays out of reach
  params.v0_step = 0.005;
  params.m = 40;
  params.widen_budget = 0;
  CHECK_THROWS_AS(optimize(config, params), NumericalError);
}

TEST_CASE("optimizer rejects a peak at the lower bound") {
  const auto config = baseline_config(1.0);
  OptimizeParams params;
  params.v0_lo = 0.2;  // already past the peak: profit only decreases
  params.v0_hi = 0.5;
  params.v0_step = 0.01;
  params.m = 50;
  CHECK_THROWS_AS(optimize(config, params), NumericalError);
}

TEST_SUITE_END();
