#pragma once

#include <utility>
#include <vector>

#include "tullock/contest.hpp"
#include "tullock/numerics.hpp"

namespace tullock::fixed_prize {

/// Converged grid equilibrium of the two-player fixed-prize contest on a
/// uniform cost grid. Stores the pdf and effort values at the grid points so
/// the profit/welfare estimators are self-contained.
struct FixedPrizeEquilibrium {
  numerics::QuadratureGrid grid;
  std::vector<double> xi;      // contributions at the grid points, decreasing
  std::vector<double> pdf_at;  // f(c_j)
  std::vector<double> effort;  // h(xi_j)
  double v0 = 0.0;
  double residual = 0.0;
};

struct FixedPrizeSolution {
  double v0_star = 0.0;
  double pi0_star = 0.0;
  FixedPrizeEquilibrium equilibrium;  // at v0_star
  double nu = 0.0;
  std::vector<std::pair<double, double>> trajectory;  // (V0, profit) sweep
};

/// Residuals of the m-equation equilibrium system at a candidate strategy:
///   delta * sum_j xi_j f(c_j) / (xi_i + xi_j)^2 - h'(xi_i) c_i / V0.
/// The discretization is the two-player form; n != 2 is rejected.
std::vector<double> residuals(const numerics::QuadratureGrid& grid,
                              std::span<const double> xi, double v0,
                              const ContestConfig& config);

/// Solves the grid equilibrium by damped Newton. `warm_start`, when given,
/// seeds the iteration (used along prize sweeps); otherwise the initial
/// guess balances the system at the top cost.
FixedPrizeEquilibrium solve_equilibrium(const ContestConfig& config, double v0,
                                        int m,
                                        const numerics::SolverSettings& settings = {},
                                        const std::vector<double>* warm_start = nullptr);

/// Quadrature profit estimate n nu delta sum_j xi_j f(c_j) - V0 (n = 2).
double profit_estimate(const FixedPrizeEquilibrium& equilibrium, double nu);

/// Discretized social welfare n delta sum_i f(c_i) (delta sum_{j>=i} h(xi_j)).
double welfare_estimate(const FixedPrizeEquilibrium& equilibrium);

struct OptimizeParams {
  double v0_lo = 0.01;
  double v0_hi = 5.0;
  double v0_step = 0.01;
  int m = 100;
  int early_stop_after = 5;  // consecutive profit decreases before stopping
  int widen_budget = 3;      // times v0_hi may be doubled if the peak hits it
};

/// Sweeps the prize grid, solving each equilibrium (warm-started), and
/// returns the profit-maximizing prize with the full trajectory. Widens the
/// upper bound when the peak is not interior; errors if it still is not.
FixedPrizeSolution optimize(const ContestConfig& config, const OptimizeParams& params = {});

}  // namespace tullock::fixed_prize
