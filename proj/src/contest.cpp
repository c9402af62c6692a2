#include "tullock/contest.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace tullock {

ContestConfig::ContestConfig(int n_, double nu_, CostDistribution dist_,
                             EffortTechnology tech_, std::uint64_t seed_)
    : n(n_), nu(nu_), dist(std::move(dist_)), tech(std::move(tech_)), seed(seed_) {
  if (n < 2) throw ValidationError("ContestConfig: requires n >= 2");
  if (!(nu > 0.0)) throw ValidationError("ContestConfig: requires nu > 0");
}

PrizeSchedule PrizeSchedule::constant(double v0) {
  if (!(v0 > 0.0)) throw ValidationError("PrizeSchedule: constant prize must be > 0");
  return PrizeSchedule(Kind::kConstant, 0.0,
                       std::numeric_limits<double>::infinity(),
                       [v0](double) { return v0; });
}

PrizeSchedule PrizeSchedule::function(double xi_lo, double xi_hi,
                                      std::function<double(double)> value) {
  if (!(xi_lo > 0.0) || !(xi_lo < xi_hi)) {
    throw ValidationError("PrizeSchedule: requires 0 < xi_lo < xi_hi");
  }
  if (!value) throw ValidationError("PrizeSchedule: value function required");
  // probe: positive and nondecreasing on the support
  constexpr int kProbe = 512;
  double prev = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kProbe; ++k) {
    const double xi = xi_lo + (xi_hi - xi_lo) * k / kProbe;
    const double v = value(xi);
    if (!(v > 0.0)) {
      throw ValidationError("PrizeSchedule: value must be positive on [" +
                            std::to_string(xi_lo) + ", " + std::to_string(xi_hi) +
                            "]");
    }
    if (v < prev - 1e-9 * std::max(1.0, std::abs(prev))) {
      throw ValidationError("PrizeSchedule: value must be nondecreasing near xi=" +
                            std::to_string(xi));
    }
    prev = v;
  }
  return PrizeSchedule(Kind::kFunction, xi_lo, xi_hi, std::move(value));
}

double PrizeSchedule::operator()(double xi) const {
  if (kind_ == Kind::kFunction && !in_domain(xi)) {
    throw DomainError("PrizeSchedule: xi=" + std::to_string(xi) +
                      " outside prize support [" + std::to_string(xi_lo_) + ", " +
                      std::to_string(xi_hi_) + "]");
  }
  return value_(xi);
}

double csf_win_prob(std::span<const double> contributions, std::size_t i) {
  if (i >= contributions.size()) {
    throw ValidationError("csf_win_prob: player index out of range");
  }
  double total = 0.0;
  for (double xi : contributions) {
    if (!(xi >= 0.0)) {
      throw ValidationError("csf_win_prob: contributions must be nonnegative");
    }
    total += xi;
  }
  if (total == 0.0) return 0.0;
  return contributions[i] / total;
}

double ex_post_payoff(const ContestConfig& config, double c_i,
                      std::span<const double> contributions, std::size_t i,
                      const PrizeSchedule& prize) {
  const double p = csf_win_prob(contributions, i);
  const double xi = contributions[i];
  if (xi == 0.0) return 0.0;  // zero win probability, zero effort
  return p * prize(xi) - config.tech.h(xi) * c_i;
}

}  // namespace tullock
