#include "tullock/opf.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tullock/numerics.hpp"
#include "tullock/rng.hpp"

namespace tullock::opf {

namespace {

constexpr int kProbePoints = 512;
constexpr double kRootTol = 1e-13;

double quad_tol(const ContestConfig& config) {
  return 1e-9 * std::max(1.0, config.nu * config.nu);
}

// Inverts the increasing h' at a positive target value by expanding a
// bracket around it.
double invert_h_prime(const std::function<double(double)>& h_prime, double y) {
  double hi = 1.0;
  int guard = 0;
  while (h_prime(hi) < y) {
    hi *= 2.0;
    if (++guard > 200) {
      throw numerics::BracketError(
          "opf_strategy: h' not invertible at value " + std::to_string(y));
    }
  }
  double lo = std::min(1.0, hi);
  guard = 0;
  while (h_prime(lo) > y) {
    lo *= 0.5;
    if (++guard > 400) {
      throw numerics::BracketError(
          "opf_strategy: h' not invertible at value " + std::to_string(y));
    }
  }
  return numerics::find_root([&](double xi) { return h_prime(xi) - y; }, lo, hi,
                             kRootTol);
}

}  // namespace

double OpfStrategy::beta(double c) const {
  if (c < c_lo_ || c > c_hi_) {
    throw DomainError("beta: c=" + std::to_string(c) + " outside support");
  }
  return invert_h_prime(h_prime_, target_(c));
}

double OpfStrategy::beta_inv(double xi) const {
  if (xi < xi_lo_ - 1e-12 || xi > xi_hi_ + 1e-12) {
    throw DomainError("beta_inv: xi=" + std::to_string(xi) +
                      " outside [xi_lo, xi_hi]");
  }
  const double clamped = std::clamp(xi, xi_lo_, xi_hi_);
  // beta is strictly decreasing, so beta(c) - xi changes sign on the support.
  return numerics::find_root([&](double c) { return beta(c) - clamped; }, c_lo_,
                             c_hi_, kRootTol);
}

double OpfStrategy::beta_inv_deriv(double xi) const {
  if (beta_inv_deriv_override_) return (*beta_inv_deriv_override_)(xi);
  const double step = 1e-6 * std::max(xi, 1e-6);
  const double lo = std::max(xi - step, xi_lo_);
  const double hi = std::min(xi + step, xi_hi_);
  return (beta_inv(hi) - beta_inv(lo)) / (hi - lo);
}

OpfStrategy opf_strategy(const ContestConfig& config) {
  const auto& dist = config.dist;
  const double c_lo = dist.c_lo(), c_hi = dist.c_hi();

  // Regularity: the virtual cost must be strictly increasing, otherwise the
  // strategy equation does not produce a decreasing beta.
  double prev_phi = virtual_cost(dist, c_lo);
  for (int k = 1; k <= kProbePoints; ++k) {
    const double c = c_lo + (c_hi - c_lo) * k / kProbePoints;
    const double phi = virtual_cost(dist, c);
    if (!(phi > prev_phi)) {
      throw ValidationError(
          "opf_strategy: virtual cost not strictly increasing near c=" +
          std::to_string(c) + " (distribution " + dist.name() +
          " is not regular)");
    }
    prev_phi = phi;
  }

  OpfStrategy s;
  s.nu_ = config.nu;
  s.c_lo_ = c_lo;
  s.c_hi_ = c_hi;
  const double nu = config.nu;
  CostDistribution d = dist;
  s.target_ = [d = std::move(d), nu](double c) { return nu / virtual_cost(d, c); };
  s.h_prime_ = [tech = config.tech](double xi) { return tech.h_prime(xi); };
  s.xi_lo_ = invert_h_prime(s.h_prime_, s.target_(c_hi));
  s.xi_hi_ = invert_h_prime(s.h_prime_, s.target_(c_lo));
  if (!(s.xi_lo_ > 0.0)) {
    throw NumericalError("opf_strategy: beta(c_hi) must be positive");
  }

  // Monotonicity and inversion round-trip on the probe grid.
  double prev_beta = s.beta(c_lo);
  for (int k = 1; k <= kProbePoints; ++k) {
    const double c = c_lo + (c_hi - c_lo) * k / kProbePoints;
    const double b = s.beta(c);
    if (!(b < prev_beta)) {
      throw NumericalError("opf_strategy: beta not strictly decreasing near c=" +
                           std::to_string(c));
    }
    prev_beta = b;
    if (k % 8 == 0) {
      const double back = s.beta_inv(b);
      if (std::abs(back - c) > 1e-8 * std::max(1.0, std::abs(c))) {
        throw NumericalError("opf_strategy: beta_inv(beta(c)) != c near c=" +
                             std::to_string(c));
      }
    }
  }
  return s;
}

WinProbability win_prob(const ContestConfig& config, const OpfStrategy& strategy,
                        double xi, long mc_samples) {
  if (!(xi > 0.0)) throw ValidationError("win_prob: requires xi > 0");
  const auto& dist = config.dist;

  if (config.n == 2) {
    const double p = numerics::integrate_1d(
        [&](double c) { return xi / (xi + strategy.beta(c)) * dist.pdf(c); },
        dist.c_lo(), dist.c_hi(), 1e-9);
    return {p, 0.0, 0};
  }

  if (mc_samples < 1) throw ValidationError("win_prob: requires mc_samples >= 1");
  // n > 2: seeded Monte Carlo over the n-1 opponent types. Opponent
  // strategies come from a dense root-found table; the interpolation error
  // is far below the Monte Carlo noise.
  constexpr int kTable = 4096;
  std::vector<double> beta_tab(kTable + 1);
  const double c_lo = dist.c_lo(), span = dist.c_hi() - dist.c_lo();
  for (int k = 0; k <= kTable; ++k) {
    beta_tab[k] = strategy.beta(c_lo + span * k / kTable);
  }
  const auto beta_at = [&](double c) {
    const double t = (c - c_lo) / span * kTable;
    const int k = std::clamp(static_cast<int>(t), 0, kTable - 1);
    const double frac = t - k;
    return beta_tab[k] + frac * (beta_tab[k + 1] - beta_tab[k]);
  };

  const CounterRng rng(config.seed);
  double sum = 0.0, sumsq = 0.0, comp = 0.0, compsq = 0.0;
  for (long t = 0; t < mc_samples; ++t) {
    double opponents = 0.0;
    for (int j = 1; j < config.n; ++j) {
      opponents += beta_at(dist.inv_cdf(rng.uniform(t, j)));
    }
    const double x = xi / (xi + opponents);
    double y = x - comp;
    double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    y = x * x - compsq;
    s = sumsq + y;
    compsq = (s - sumsq) - y;
    sumsq = s;
  }
  const double mean = sum / mc_samples;
  const double var =
      std::max(0.0, (sumsq - sum * sum / mc_samples) / (mc_samples - 1));
  return {mean, std::sqrt(var / mc_samples), mc_samples};
}

double opf_prize(const ContestConfig& config, const OpfStrategy& strategy,
                 double xi_w) {
  if (xi_w < strategy.xi_lo() - 1e-12 || xi_w > strategy.xi_hi() + 1e-12) {
    throw DomainError("opf_prize: xi_w=" + std::to_string(xi_w) +
                      " outside the prize support [" +
                      std::to_string(strategy.xi_lo()) + ", " +
                      std::to_string(strategy.xi_hi()) + "]");
  }
  const double xi = std::clamp(xi_w, strategy.xi_lo(), strategy.xi_hi());
  const auto& tech = config.tech;
  // Stieltjes integral \int h(x) d beta_inv(x), with d beta_inv/dx by finite
  // differences (or the strategy's closed-form override).
  const double stieltjes =
      (xi > strategy.xi_lo())
          ? numerics::integrate_1d(
                [&](double x) { return tech.h(x) * strategy.beta_inv_deriv(x); },
                strategy.xi_lo(), xi,
                1e-7 * std::max(1.0, config.nu * config.nu))
          : 0.0;
  const double numerator = strategy.beta_inv(xi) * tech.h(xi) - stieltjes;
  const double p = win_prob(config, strategy, xi).value;
  if (!(p > 0.0)) {
    throw NumericalError("opf_prize: winning probability vanished at xi_w=" +
                         std::to_string(xi_w));
  }
  return numerator / p;
}

double opf_profit(const ContestConfig& config) {
  const OpfStrategy strategy = opf_strategy(config);
  const auto& dist = config.dist;
  const auto& tech = config.tech;
  const double h_lo = tech.h(strategy.xi_lo());
  const double integral = numerics::integrate_1d(
      [&](double c) {
        const double b = strategy.beta(c);
        const double hb = tech.h(b);
        const double ratio = dist.cdf(c) / dist.pdf(c);
        return (config.nu * b - hb * c + ratio * (h_lo - hb)) * dist.pdf(c);
      },
      dist.c_lo(), dist.c_hi(), quad_tol(config) * config.n);
  return config.n * integral;
}

double opf_welfare(const ContestConfig& config) {
  const OpfStrategy strategy = opf_strategy(config);
  const auto& dist = config.dist;
  const auto& tech = config.tech;
  const double c_hi = dist.c_hi();
  const double outer_tol = quad_tol(config) * config.n;
  const double inner_tol = outer_tol / 20.0;
  const double integral = numerics::integrate_1d(
      [&](double c) {
        const double inner = numerics::integrate_1d(
            [&](double ct) { return tech.h(strategy.beta(ct)); }, c, c_hi,
            inner_tol);
        return inner * dist.pdf(c);
      },
      dist.c_lo(), c_hi, outer_tol);
  return config.n * integral;
}

double expected_utility(const ContestConfig& config, const OpfStrategy& strategy,
                        double c) {
  const auto& dist = config.dist;
  if (!dist.contains(c)) {
    throw DomainError("expected_utility: c outside support");
  }
  const auto& tech = config.tech;
  const double envelope =
      (c < dist.c_hi())
          ? numerics::integrate_1d(
                [&](double ct) { return tech.h(strategy.beta(ct)); }, c,
                dist.c_hi(), quad_tol(config))
          : 0.0;
  const double xi = strategy.beta(c);
  const double direct =
      win_prob(config, strategy, xi).value * opf_prize(config, strategy, xi) -
      tech.h(xi) * c;
  if (std::abs(direct - envelope) > 1e-3 * (1.0 + std::abs(envelope))) {
    throw NumericalError(
        "expected_utility: direct and envelope routes disagree at c=" +
        std::to_string(c) + " (direct " + std::to_string(direct) + ", envelope " +
        std::to_string(envelope) + ")");
  }
  return envelope;
}

OpfSolution solve(const ContestConfig& config) {
  OpfStrategy strategy = opf_strategy(config);
  const double profit = opf_profit(config);
  const double welfare = opf_welfare(config);
  PrizeSchedule prize = PrizeSchedule::function(
      strategy.xi_lo(), strategy.xi_hi(),
      [config, strategy](double xi) { return opf_prize(config, strategy, xi); });
  return OpfSolution{std::move(strategy), std::move(prize), profit, welfare,
                     config};
}

}  // namespace tullock::opf
