#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "tullock/distribution.hpp"
#include "tullock/errors.hpp"
#include "tullock/technology.hpp"

namespace tullock {

/// A full problem instance: player count, the crowdsourcer's per-unit
/// valuation of contribution, the common prior and the effort technology.
struct ContestConfig {
  ContestConfig(int n, double nu, CostDistribution dist, EffortTechnology tech,
                std::uint64_t seed);

  int n;
  double nu;
  CostDistribution dist;
  EffortTechnology tech;
  std::uint64_t seed;

  ContestConfig with_n(int new_n) const {
    return ContestConfig(new_n, nu, dist, tech, seed);
  }
  ContestConfig with_nu(double new_nu) const {
    return ContestConfig(n, new_nu, dist, tech, seed);
  }
};

/// Winner's reward as a function of the winning contribution. Either a
/// constant (conventional contest) or a function on its support
/// [xi_lo, xi_hi]; function evaluation off-support is an error, not an
/// extrapolation.
class PrizeSchedule {
 public:
  enum class Kind { kConstant, kFunction };

  static PrizeSchedule constant(double v0);
  static PrizeSchedule function(double xi_lo, double xi_hi,
                                std::function<double(double)> value);

  double operator()(double xi) const;
  bool in_domain(double xi) const { return xi >= xi_lo_ && xi <= xi_hi_; }

  Kind kind() const { return kind_; }
  double xi_lo() const { return xi_lo_; }
  double xi_hi() const { return xi_hi_; }

 private:
  PrizeSchedule(Kind kind, double lo, double hi, std::function<double(double)> v)
      : kind_(kind), xi_lo_(lo), xi_hi_(hi), value_(std::move(v)) {}

  Kind kind_;
  double xi_lo_, xi_hi_;
  std::function<double(double)> value_;
};

/// Lottery winning probability xi_i / sum_j xi_j; zero for everyone when all
/// contributions are zero (no winner on an all-zero profile).
double csf_win_prob(std::span<const double> contributions, std::size_t i);

/// Ex-post payoff of player i at a contribution profile:
/// win probability times the prize at xi_i, minus effort cost h(xi_i) * c_i.
double ex_post_payoff(const ContestConfig& config, double c_i,
                      std::span<const double> contributions, std::size_t i,
                      const PrizeSchedule& prize);

}  // namespace tullock
