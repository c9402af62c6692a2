#include "tullock/fixed_prize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tullock::fixed_prize {

namespace {

void require_two_players(const ContestConfig& config, const char* op) {
  if (config.n != 2) {
    throw ValidationError(std::string(op) +
                          ": the grid discretization is the two-player form "
                          "(n=2); got n=" +
                          std::to_string(config.n));
  }
}

// Initial guess: the constant contribution balancing the system at the top
// cost, 1/(4 xi) = h'(xi) c_hi / V0. For h(xi) = xi^2 this is sqrt(V0)/4.
double balance_guess(const ContestConfig& config, double v0) {
  const double c_hi = config.dist.c_hi();
  const auto f = [&](double xi) {
    return 1.0 / (4.0 * xi) - config.tech.h_prime(xi) * c_hi / v0;
  };
  double hi = 1.0;
  int guard = 0;
  while (f(hi) > 0.0 && ++guard < 200) hi *= 2.0;
  double lo = 1e-8;
  guard = 0;
  while (f(lo) < 0.0 && ++guard < 200) lo *= 0.5;
  return numerics::find_root(f, lo, hi, 1e-12);
}

}  // namespace

std::vector<double> residuals(const numerics::QuadratureGrid& grid,
                              std::span<const double> xi, double v0,
                              const ContestConfig& config) {
  require_two_players(config, "fixed_prize::residuals");
  const std::size_t m = grid.points.size();
  if (xi.size() != m) {
    throw ValidationError("fixed_prize::residuals: xi size must match the grid");
  }
  if (!(v0 > 0.0)) throw ValidationError("fixed_prize::residuals: requires V0 > 0");

  std::vector<double> pdf_at(m);
  for (std::size_t j = 0; j < m; ++j) pdf_at[j] = config.dist.pdf(grid.points[j]);

  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    double quad = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double s = xi[i] + xi[j];
      quad += xi[j] * pdf_at[j] / (s * s);
    }
    out[i] = grid.weight * quad -
             config.tech.h_prime(xi[i]) * grid.points[i] / v0;
  }
  return out;
}

FixedPrizeEquilibrium solve_equilibrium(const ContestConfig& config, double v0,
                                        int m,
                                        const numerics::SolverSettings& settings,
                                        const std::vector<double>* warm_start) {
  require_two_players(config, "fixed_prize::solve_equilibrium");
  if (!(v0 > 0.0)) throw ValidationError("solve_equilibrium: requires V0 > 0");
  if (m < 2) throw ValidationError("solve_equilibrium: requires m >= 2");

  const auto grid =
      numerics::QuadratureGrid::uniform(config.dist.c_lo(), config.dist.c_hi(), m);
  std::vector<double> pdf_at(m);
  for (int j = 0; j < m; ++j) pdf_at[j] = config.dist.pdf(grid.points[j]);

  const auto system = [&](const std::vector<double>& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      double quad = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double s = x[i] + x[j];
        quad += x[j] * pdf_at[j] / (s * s);
      }
      out[i] = grid.weight * quad -
               config.tech.h_prime(x[i]) * grid.points[i] / v0;
    }
    return out;
  };

  std::vector<double> x0;
  if (warm_start != nullptr && static_cast<int>(warm_start->size()) == m) {
    x0 = *warm_start;
  } else {
    x0.assign(m, balance_guess(config, v0));
  }

  std::vector<double> xi;
  try {
    xi = numerics::solve_system(system, x0, settings);
  } catch (const numerics::SolveError& e) {
    throw numerics::SolveError("solve_equilibrium (V0=" + std::to_string(v0) +
                                   ", m=" + std::to_string(m) + "): " + e.what(),
                               e.last_iterate, e.residual);
  }

  for (int i = 1; i < m; ++i) {
    if (xi[i] > xi[i - 1] + 1e-12) {
      throw NumericalError("solve_equilibrium (V0=" + std::to_string(v0) +
                           "): strategy not nonincreasing at grid index " +
                           std::to_string(i));
    }
  }

  FixedPrizeEquilibrium eq;
  eq.grid = grid;
  eq.residual = numerics::max_abs(residuals(eq.grid, xi, v0, config));
  eq.xi = std::move(xi);
  eq.pdf_at = std::move(pdf_at);
  eq.effort.resize(m);
  for (int j = 0; j < m; ++j) eq.effort[j] = config.tech.h(eq.xi[j]);
  eq.v0 = v0;
  return eq;
}

double profit_estimate(const FixedPrizeEquilibrium& equilibrium, double nu) {
  double revenue = 0.0;
  for (std::size_t j = 0; j < equilibrium.xi.size(); ++j) {
    revenue += equilibrium.xi[j] * equilibrium.pdf_at[j];
  }
  return 2.0 * nu * equilibrium.grid.weight * revenue - equilibrium.v0;
}

double welfare_estimate(const FixedPrizeEquilibrium& equilibrium) {
  const double delta = equilibrium.grid.weight;
  const std::size_t m = equilibrium.xi.size();
  // suffix sums of h(xi_j): inner integral from c_i to the top cost
  double tail = 0.0;
  std::vector<double> inner(m);
  for (std::size_t i = m; i-- > 0;) {
    tail += equilibrium.effort[i];
    inner[i] = delta * tail;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    total += equilibrium.pdf_at[i] * inner[i];
  }
  return 2.0 * delta * total;
}

FixedPrizeSolution optimize(const ContestConfig& config, const OptimizeParams& params) {
  require_two_players(config, "fixed_prize::optimize");
  if (!(params.v0_lo > 0.0) || !(params.v0_lo < params.v0_hi) ||
      !(params.v0_step > 0.0)) {
    throw ValidationError("optimize: requires 0 < v0_lo < v0_hi and a positive step");
  }

  FixedPrizeSolution sol;
  sol.nu = config.nu;

  double v0_hi = params.v0_hi;
  int widenings = 0;
  std::vector<double> warm;
  const std::vector<double>* warm_ptr = nullptr;

  std::size_t best_index = 0;
  double best_profit = -std::numeric_limits<double>::infinity();
  FixedPrizeEquilibrium best_eq;
  int decreasing_run = 0;
  bool early_stopped = false;

  for (std::size_t k = 0;; ++k) {
    const double v0 = params.v0_lo + static_cast<double>(k) * params.v0_step;
    if (v0 > v0_hi + 1e-12 * std::max(1.0, v0_hi)) {
      // swept to the top: the peak must not sit on the boundary
      if (best_index + 1 == sol.trajectory.size()) {
        if (widenings < params.widen_budget) {
          ++widenings;
          v0_hi *= 2.0;
          --k;  // retry the same index on the widened range
          continue;
        }
        throw NumericalError(
            "optimize: profit peak at the upper prize bound after widening "
            "(nu=" + std::to_string(config.nu) + ")");
      }
      break;
    }

    FixedPrizeEquilibrium eq =
        solve_equilibrium(config, v0, params.m, {}, warm_ptr);
    warm = eq.xi;
    warm_ptr = &warm;
    const double profit = profit_estimate(eq, config.nu);
    sol.trajectory.emplace_back(v0, profit);

    if (profit > best_profit) {
      best_profit = profit;
      best_index = sol.trajectory.size() - 1;
      best_eq = std::move(eq);
      decreasing_run = 0;
    } else {
      const auto& t = sol.trajectory;
      if (t.size() >= 2 && t[t.size() - 1].second < t[t.size() - 2].second) {
        ++decreasing_run;
      } else {
        decreasing_run = 0;
      }
      if (decreasing_run >= params.early_stop_after) {
        early_stopped = true;
        break;
      }
    }
  }

  if (best_index == 0 && sol.trajectory.size() > 1) {
    throw NumericalError("optimize: profit peak at the lower prize bound (nu=" +
                         std::to_string(config.nu) + "); lower v0_lo");
  }
  if (!early_stopped && sol.trajectory.empty()) {
    throw ValidationError("optimize: empty prize grid");
  }

  sol.v0_star = sol.trajectory[best_index].first;
  sol.pi0_star = best_profit;
  sol.equilibrium = std::move(best_eq);
  return sol;
}

}  // namespace tullock::fixed_prize
