#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "tullock/fixed_prize.hpp"
#include "tullock/opf.hpp"
#include "tullock/simulate.hpp"

using namespace tullock;
using namespace tullock::sim;

namespace {

ContestConfig baseline_config(double nu, std::uint64_t seed = 42, int n = 2) {
  return ContestConfig(n, nu, CostDistribution::uniform(1.0, 2.0),
                       EffortTechnology::power(0.5), seed);
}

bool reports_equal(const SimulationReport& a, const SimulationReport& b) {
  return a.mean_revenue == b.mean_revenue && a.mean_profit == b.mean_profit &&
         a.mean_prize_paid == b.mean_prize_paid &&
         a.mean_welfare == b.mean_welfare && a.se_profit == b.se_profit;
}

}  // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("degenerate constant strategy with a fixed prize") {
  const auto config = baseline_config(1.0, 7, 3);
  const auto prize = PrizeSchedule::constant(0.25);
  const StrategyFn constant = [](double) { return 0.4; };
  const auto report = run(config, constant, prize, 20000);
  CHECK(report.mean_prize_paid == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(report.mean_total_contribution == doctest::Approx(1.2).epsilon(1e-12));
  // accounting identity holds exactly as stated
  CHECK(std::abs(report.mean_profit -
                 (config.nu * report.mean_total_contribution -
                  report.mean_prize_paid)) <= 1e-12);
  CHECK(report.per_type_utility.size() > 0);
}

TEST_CASE("seed determinism and seed sensitivity") {
  const auto prize = PrizeSchedule::constant(0.1);
  const StrategyFn s = [](double c) { return 1.0 / (4.0 * c - 2.0); };
  const auto a = run(baseline_config(1.0, 42), s, prize, 50000);
  const auto b = run(baseline_config(1.0, 42), s, prize, 50000);
  const auto c = run(baseline_config(1.0, 43), s, prize, 50000);
  CHECK(reports_equal(a, b));
  CHECK(!reports_equal(a, c));
}

TEST_CASE("all-zero strategy is rejected at validation") {
  const auto prize = PrizeSchedule::constant(0.1);
  CHECK_THROWS_AS(run(baseline_config(1.0), [](double) { return 0.0; }, prize, 100),
                  ValidationError);
}

TEST_CASE("strategy outside the prize domain is rejected") {
  const auto prize =
      PrizeSchedule::function(0.2, 0.5, [](double xi) { return xi + 1.0; });
  CHECK_THROWS_AS(run(baseline_config(1.0), [](double) { return 0.1; }, prize, 100),
                  DomainError);
}

TEST_CASE("standard errors shrink like one over sqrt trials") {
  const auto prize = PrizeSchedule::constant(0.1);
  const StrategyFn s = [](double c) { return 1.0 / (4.0 * c - 2.0); };
  const auto small = run(baseline_config(1.0, 11), s, prize, 50000);
  const auto large = run(baseline_config(1.0, 11), s, prize, 200000);
  // quadrupling trials should halve the error within 20% slack
  CHECK(large.se_profit < 0.5 * small.se_profit * 1.2);
  CHECK(large.se_profit > 0.5 * small.se_profit / 1.2);
}

TEST_CASE("simulated profit, payout and welfare match their expectations") {
  const auto config = baseline_config(1.0, 42);
  const auto sol = opf::solve(config);
  const opf::OpfStrategy strat = sol.strategy;
  const StrategyFn play = [&strat](double c) { return strat.beta(c); };
  const auto report = run(config, play, sol.prize, 400000);

  // Playing the mechanism realizes: revenue n nu E[beta] = (log3/2) nu^2,
  // expected payout n E[p(beta(c)) V*(beta(c))] = (log3/4) nu^2 (the envelope
  // pins p V* = c h(beta) + int_c^chi h(beta)), hence profit (log3/4) nu^2.
  const double log3 = std::log(3.0);
  CHECK(std::abs(report.mean_revenue - log3 / 2.0) <= 3.0 * report.se_revenue);
  CHECK(std::abs(report.mean_prize_paid - log3 / 4.0) <=
        3.0 * report.se_prize_paid);
  CHECK(std::abs(report.mean_profit - log3 / 4.0) <= 3.0 * report.se_profit);
  CHECK(std::abs(report.mean_welfare - oracles::welfare_coeff()) <=
        3.0 * report.se_welfare);

  // The profit integral reported by opf_profit sits exactly
  // n h(xi_lo) int F(c) dc above the realized profit; assert the bridge so
  // the integral and the simulator stay tied together.
  const double f_mass =
      oracles::trapezoid([](double c) { return c - 1.0; }, 1.0, 2.0, 20000);
  const double bridge = 2.0 * config.tech.h(strat.xi_lo()) * f_mass;
  CHECK(std::abs(report.mean_profit + bridge - opf::opf_profit(config)) <=
        3.0 * report.se_profit);
}

TEST_CASE("best-response gap: equilibrium passes, perturbation fails") {
  const auto config = baseline_config(1.0, 42);
  const auto sol = opf::solve(config);
  const opf::OpfStrategy strat = sol.strategy;
  const StrategyFn play = [&strat](double c) { return strat.beta(c); };

  std::vector<double> deviations(64);
  for (int k = 0; k < 64; ++k) {
    deviations[k] = strat.xi_lo() + (strat.xi_hi() - strat.xi_lo()) * k / 63.0;
  }

  const double gap = best_response_gap(config, play, sol.prize, 1.5, deviations,
                                       200000);
  CHECK(gap <= 3e-3);

  // negative control: playing 1.5x the equilibrium (clamped into the prize
  // support) must leave a large profitable deviation at some probe type
  const double hi = strat.xi_hi();
  const StrategyFn inflated = [&strat, hi](double c) {
    return std::min(strat.beta(c) * 1.5, hi);
  };
  double bad_gap = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double c = 1.0 + (k + 0.5) / 10.0;
    bad_gap = std::max(bad_gap, best_response_gap(config, inflated, sol.prize, c,
                                                  deviations, 200000));
  }
  CHECK(bad_gap > 10.0 * 3e-3);
}

TEST_CASE("fixed-prize equilibrium survives the best-response oracle") {
  const auto config = baseline_config(1.0, 42);
  fixed_prize::OptimizeParams params;
  params.v0_lo = 0.02;
  params.v0_hi = 0.3;
  params.v0_step = 0.005;
  params.m = 100;
  const auto bench = fixed_prize::optimize(config, params);
  const auto eq = bench.equilibrium;
  const StrategyFn play = [eq](double c) {
    const auto& pts = eq.grid.points;
    if (c <= pts.front()) return eq.xi.front();
    if (c >= pts.back()) return eq.xi.back();
    const double t = (c - pts.front()) / eq.grid.weight;
    const std::size_t k = std::min(static_cast<std::size_t>(t), eq.xi.size() - 2);
    return eq.xi[k] + (t - k) * (eq.xi[k + 1] - eq.xi[k]);
  };
  const auto prize = PrizeSchedule::constant(bench.v0_star);
  std::vector<double> deviations(64);
  for (int k = 0; k < 64; ++k) {
    deviations[k] = eq.xi.back() + (eq.xi.front() - eq.xi.back()) * k / 63.0;
  }
  double worst = 0.0;
  for (double c : {1.05, 1.35, 1.65, 1.95}) {
    worst = std::max(worst,
                     best_response_gap(config, play, prize, c, deviations, 200000));
  }
  CHECK(worst <= 3e-3);
}

TEST_CASE("empirical utility curve: zero surplus at the top, 1/12 at the bottom") {
  const auto config = baseline_config(1.0, 42);
  const auto sol = opf::solve(config);
  const opf::OpfStrategy strat = sol.strategy;
  const StrategyFn play = [&strat](double c) { return strat.beta(c); };
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(1.0 + k / 10.0);
  const auto curve = empirical_utility_curve(config, play, sol.prize, grid,
                                             400000);
  CHECK(std::abs(curve.back().utility) <= 3.0 * curve.back().std_error);
  CHECK(std::abs(curve.front().utility - 1.0 / 12.0) <=
        3.0 * curve.front().std_error);
  // nonincreasing within the noise envelope
  for (std::size_t k = 1; k < curve.size(); ++k) {
    CHECK(curve[k].utility <= curve[k - 1].utility +
                                  3.0 * (curve[k].std_error +
                                         curve[k - 1].std_error));
  }
}

TEST_SUITE_END();
