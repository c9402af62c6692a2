#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "tullock/contest.hpp"

namespace tullock::sim {

using StrategyFn = std::function<double(double)>;

struct SimulationReport {
  long trials = 0;
  double mean_revenue = 0.0;
  double mean_prize_paid = 0.0;
  double mean_profit = 0.0;
  double mean_welfare = 0.0;
  double mean_total_contribution = 0.0;
  double se_revenue = 0.0;
  double se_prize_paid = 0.0;
  double se_profit = 0.0;
  double se_welfare = 0.0;
  std::vector<std::pair<double, double>> per_type_utility;  // sampled (c, utility)
};

/// Plays the contest for `trials` rounds: draws n types i.i.d. from the
/// prior (inverse CDF, counter-based RNG keyed by config.seed), maps them
/// through the strategy, runs the winner lottery and pays the prize.
/// Deterministic given the seed, independent of thread schedule.
SimulationReport run(const ContestConfig& config, const StrategyFn& strategy,
                     const PrizeSchedule& prize, long trials);

/// Brute-force epsilon-equilibrium oracle: the largest Monte-Carlo utility
/// gain type c can get by deviating from strategy(c) to any grid point,
/// against n-1 opponents playing the strategy. Deviations share the opponent
/// draws (common random numbers), so the gap estimate is low-variance.
double best_response_gap(const ContestConfig& config, const StrategyFn& strategy,
                         const PrizeSchedule& prize, double c,
                         std::span<const double> deviation_grid, long trials);

struct UtilityPoint {
  double c = 0.0;
  double utility = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo expected-utility curve over a grid of types (conditional
/// expectation over the lottery, so only opponent types are sampled).
std::vector<UtilityPoint> empirical_utility_curve(const ContestConfig& config,
                                                  const StrategyFn& strategy,
                                                  const PrizeSchedule& prize,
                                                  std::span<const double> c_grid,
                                                  long trials);

}  // namespace tullock::sim
