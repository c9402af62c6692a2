#pragma once

#include <functional>
#include <optional>

#include "tullock/contest.hpp"

namespace tullock::opf {

/// Equilibrium contribution strategy of the prize-function mechanism.
/// beta solves h'(xi) = nu / (c + F(c)/f(c)) by bracketed root finding;
/// beta_inv root-finds beta over the cost support. The strategy does not
/// depend on the number of players.
class OpfStrategy {
 public:
  double beta(double c) const;
  double beta_inv(double xi) const;
  /// d(beta_inv)/dxi by central differences (step 1e-6 * xi), or the
  /// installed closed-form override.
  double beta_inv_deriv(double xi) const;

  double xi_lo() const { return xi_lo_; }  // beta(c_hi)
  double xi_hi() const { return xi_hi_; }  // beta(c_lo)
  double c_lo() const { return c_lo_; }
  double c_hi() const { return c_hi_; }

  void set_beta_inv_deriv(std::function<double(double)> fn) {
    beta_inv_deriv_override_ = std::move(fn);
  }

 private:
  friend OpfStrategy opf_strategy(const ContestConfig& config);

  double nu_ = 0.0;
  double c_lo_ = 0.0, c_hi_ = 0.0;
  double xi_lo_ = 0.0, xi_hi_ = 0.0;
  std::function<double(double)> target_;   // c -> nu / phi(c)
  std::function<double(double)> h_prime_;  // technology derivative
  std::optional<std::function<double(double)>> beta_inv_deriv_override_;
};

struct WinProbability {
  double value = 0.0;
  double std_error = 0.0;  // zero on the quadrature path (n = 2)
  long samples = 0;        // zero on the quadrature path
};

struct OpfSolution {
  OpfStrategy strategy;
  PrizeSchedule prize;
  double profit = 0.0;
  double welfare = 0.0;
  ContestConfig config;
};

/// Builds the equilibrium strategy; fails fast if the virtual cost is not
/// strictly increasing on the probe grid (regularity) or h' cannot be
/// inverted at a required value.
OpfStrategy opf_strategy(const ContestConfig& config);

/// Winning probability p(xi) against n-1 opponents playing the strategy.
/// n = 2 uses adaptive quadrature; n > 2 uses seeded Monte Carlo with a
/// reported standard error.
WinProbability win_prob(const ContestConfig& config, const OpfStrategy& strategy,
                        double xi, long mc_samples = 1'000'000);

/// Optimal prize at a winning contribution xi_w in [xi_lo, xi_hi]:
/// V*(xi_w) = [beta_inv(xi_w) h(xi_w) - \int_{xi_lo}^{xi_w} h d(beta_inv)] / p(xi_w).
double opf_prize(const ContestConfig& config, const OpfStrategy& strategy,
                 double xi_w);

/// Crowdsourcer's maximum profit (single integral over the cost prior).
double opf_profit(const ContestConfig& config);

/// Players' aggregate equilibrium utility (nested integral).
double opf_welfare(const ContestConfig& config);

/// Expected utility of type c. Evaluates both the direct form
/// p(beta(c)) V*(beta(c)) - h(beta(c)) c and the envelope form
/// \int_c^{c_hi} h(beta) and returns the envelope value; disagreement
/// beyond 1e-3 relative raises a NumericalError (built-in consistency check).
double expected_utility(const ContestConfig& config, const OpfStrategy& strategy,
                        double c);

/// Full mechanism solve: strategy, prize schedule, profit and welfare.
OpfSolution solve(const ContestConfig& config);

}  // namespace tullock::opf
