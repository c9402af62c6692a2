#include <array>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "tullock/numerics.hpp"
#include "tullock/opf.hpp"

using namespace tullock;
using namespace tullock::opf;

namespace {

ContestConfig baseline_config(double nu, int n = 2) {
  return ContestConfig(n, nu, CostDistribution::uniform(1.0, 2.0),
                       EffortTechnology::power(0.5), 99);
}

ContestConfig pop2_config(double nu, int n = 2) {
  return ContestConfig(n, nu, CostDistribution::uniform(0.5, 2.5),
                       EffortTechnology::power(0.5), 99);
}

}  // namespace

TEST_SUITE_BEGIN("opf");

TEST_CASE("strategy matches the closed form") {
  const auto config = baseline_config(1.0);
  const auto s = opf_strategy(config);
  CHECK(s.beta(1.5) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(s.beta(2.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(s.xi_lo() == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(s.xi_hi() == doctest::Approx(0.5).epsilon(1e-9));
  for (int k = 0; k < 50; ++k) {
    const double c = 1.0 + k / 49.0;
    CHECK(s.beta(c) ==
          doctest::Approx(oracles::beta_cf(c, 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("strategy on the second population") {
  const auto s = opf_strategy(pop2_config(2.0));
  CHECK(s.beta(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  for (int k = 0; k < 20; ++k) {
    const double c = 0.5 + 2.0 * k / 19.0;
    CHECK(s.beta(c) ==
          doctest::Approx(oracles::beta_pop2_cf(c, 2.0)).epsilon(1e-9));
  }
}

TEST_CASE("strategy is agnostic to the number of players") {
  const auto s2 = opf_strategy(baseline_config(1.0, 2));
  const auto s5 = opf_strategy(baseline_config(1.0, 5));
  const auto s10 = opf_strategy(baseline_config(1.0, 10));
  for (int k = 0; k <= 64; ++k) {
    const double c = 1.0 + k / 64.0;
    const double b = s2.beta(c);
    CHECK(std::abs(b - s5.beta(c)) <= 1e-10);
    CHECK(std::abs(b - s10.beta(c)) <= 1e-10);
  }
}

TEST_CASE("strategy fails fast when the virtual cost is not increasing") {
  // valley-shaped pdf: the virtual cost rises into the thin region and falls
  // after it, so the regularity validator must reject the instance
  const double eps = 0.01;
  const double norm = 1.0 / (eps + 2.0 * 0.125 / 3.0);
  const auto cdf = [eps, norm](double c) {
    if (c <= 1.0) return 0.0;
    if (c >= 2.0) return 1.0;
    const double d = c - 1.5;
    return norm * (eps * (c - 1.0) + (d * d * d + 0.125) / 3.0);
  };
  const auto pdf = [eps, norm](double c) {
    return norm * (eps + (c - 1.5) * (c - 1.5));
  };
  const auto inv = [&cdf](double u) {
    double lo = 1.0, hi = 2.0;
    for (int k = 0; k < 80; ++k) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const CostDistribution valley(1.0, 2.0, cdf, pdf, inv, "valley");
  const ContestConfig config(2, 1.0, valley, EffortTechnology::power(0.5), 0);
  CHECK_THROWS_WITH_AS(opf_strategy(config),
                       doctest::Contains("not strictly increasing"),
                       ValidationError);
}

TEST_CASE("strategy rejects a non-invertible technology derivative") {
  // alpha = 1 means h' is constant: no bracket can invert it
  const ContestConfig config(2, 1.0, CostDistribution::uniform(1.0, 2.0),
                             EffortTechnology::power(1.0), 0);
  CHECK_THROWS_AS(opf_strategy(config), numerics::BracketError);
}

TEST_CASE("beta_inv round-trips and differentiates") {
  const auto s = opf_strategy(baseline_config(1.0));
  for (int k = 1; k < 20; ++k) {
    const double xi = 1.0 / 6.0 + (0.5 - 1.0 / 6.0) * k / 20.0;
    CHECK(s.beta_inv(xi) ==
          doctest::Approx(oracles::beta_inv_cf(xi, 1.0)).epsilon(1e-8));
    // d beta_inv / d xi = -nu / (4 xi^2)
    CHECK(s.beta_inv_deriv(xi) ==
          doctest::Approx(-1.0 / (4.0 * xi * xi)).epsilon(1e-4));
  }
  CHECK_THROWS_AS(s.beta_inv(0.6), DomainError);
}

TEST_CASE("win probability against the closed form") {
  const auto config = baseline_config(1.0);
  const auto s = opf_strategy(config);
  const auto p_half = win_prob(config, s, 0.5);
  CHECK(p_half.value == doctest::Approx(0.653426).epsilon(2e-6));
  CHECK(p_half.value ==
        doctest::Approx(oracles::win_prob_cf(0.5, 1.0)).epsilon(1e-6));
  CHECK(p_half.std_error == 0.0);
  const auto p_lo = win_prob(config, s, 1.0 / 6.0);
  CHECK(p_lo.value == doctest::Approx(0.391802).epsilon(2e-6));
  CHECK(win_prob(config, s, 1e9).value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("win probability for n=3 against a tensor-quadrature oracle") {
  const auto config = baseline_config(1.0, 3);
  const auto s = opf_strategy(config);
  const double xi = 0.3;
  // E[xi / (xi + beta(c1) + beta(c2))] over uniform[1,2]^2
  const double reference = oracles::midpoint_2d(
      [&](double c1, double c2) {
        return xi / (xi + oracles::beta_cf(c1, 1.0) + oracles::beta_cf(c2, 1.0));
      },
      1.0, 2.0, 600);
  const auto p = win_prob(config, s, xi, 200'000);
  CHECK(p.std_error > 0.0);
  CHECK(p.samples == 200'000);
  CHECK(std::abs(p.value - reference) <=
        3.0 * p.std_error + 1e-5);  // quadrature bias allowance
  // deterministic given the seed
  const auto p2 = win_prob(config, s, xi, 200'000);
  CHECK(p.value == p2.value);
}

TEST_CASE("optimal prize matches the closed form") {
  const auto config = baseline_config(1.0);
  const auto s = opf_strategy(config);
  CHECK(opf_prize(config, s, 0.5) == doctest::Approx(0.510131).epsilon(2e-4));
  CHECK(opf_prize(config, s, 1.0 / 6.0) ==
        doctest::Approx(0.141795).epsilon(2e-4));
  for (int k = 0; k <= 20; ++k) {
    const double xi = 1.0 / 6.0 + (0.5 - 1.0 / 6.0) * k / 20.0;
    CHECK(opf_prize(config, s, xi) ==
          doctest::Approx(oracles::prize_cf(xi, 1.0)).epsilon(1e-4));
  }
  // nondecreasing just above the lower support end
  const double at_lo = opf_prize(config, s, s.xi_lo());
  CHECK(opf_prize(config, s, s.xi_lo() * 1.0001) >= at_lo - 1e-9);
  CHECK_THROWS_AS(opf_prize(config, s, 0.9), DomainError);
}

TEST_CASE("ex post payoff with the optimal prize schedule") {
  const auto config = baseline_config(1.0);
  const auto sol = solve(config);
  const std::array<double, 2> xs{0.5, 1.0 / 6.0};
  const double payoff = ex_post_payoff(config, 1.0, xs, 0, sol.prize);
  CHECK(payoff == doctest::Approx(0.132598).epsilon(5e-4));
}

TEST_CASE("profit matches the closed forms") {
  CHECK(opf_profit(baseline_config(1.0)) ==
        doctest::Approx(oracles::profit_coeff()).epsilon(1e-8));
  CHECK(opf_profit(baseline_config(1.0)) == doctest::Approx(0.3024).epsilon(2e-4));
  CHECK(opf_profit(baseline_config(5.0)) == doctest::Approx(7.5608).epsilon(2e-5));

  // diverse population: pin the profit integral against direct quadrature of
  // its integrand and the analytic value (log3/8 + 1/81) * n * nu^2
  const double by_quadrature =
      2.0 * oracles::trapezoid(
                [](double c) {
                  const double b = 1.0 / (4.0 * c - 1.0);
                  return (b - b * b * c + (c - 0.5) * (1.0 / 81.0 - b * b)) * 0.5;
                },
                0.5, 2.5, 400000);
  const double pop2 = opf_profit(pop2_config(1.0));
  CHECK(pop2 == doctest::Approx(by_quadrature).epsilon(1e-7));
  CHECK(pop2 ==
        doctest::Approx(2.0 * oracles::profit_coeff_pop2_integral()).epsilon(1e-6));
}

TEST_CASE("welfare matches the closed forms and a Fubini oracle") {
  const double w = opf_welfare(baseline_config(1.0));
  CHECK(w == doctest::Approx(oracles::welfare_coeff()).epsilon(1e-7));
  CHECK(w == doctest::Approx(0.0540).epsilon(2e-4));
  CHECK(opf_welfare(baseline_config(5.0)) == doctest::Approx(1.3498).epsilon(3e-5));
  CHECK(opf_welfare(pop2_config(1.0)) ==
        doctest::Approx(2.0 * oracles::welfare_coeff_pop2()).epsilon(1e-6));
  // Fubini: U = n * int F(c) h(beta(c)) dc, one integral instead of two
  const double fubini =
      2.0 * oracles::trapezoid(
                [](double c) {
                  const double b = oracles::beta_cf(c, 1.0);
                  return (c - 1.0) * b * b;
                },
                1.0, 2.0, 400000);
  CHECK(w == doctest::Approx(fubini).epsilon(1e-7));
}

TEST_CASE("expected utility: envelope value, SIR, and both routes agree") {
  const auto config = baseline_config(1.0);
  const auto s = opf_strategy(config);
  CHECK(expected_utility(config, s, 2.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(expected_utility(config, s, 1.0) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-7));
  for (int k = 0; k < 50; ++k) {
    const double c = 1.0 + k / 49.0;
    const double u = expected_utility(config, s, c);  // throws on divergence
    CHECK(u == doctest::Approx(oracles::utility_cf(c, 1.0)).epsilon(1e-6));
    if (c < 2.0) CHECK(u > 0.0);
  }
}

TEST_CASE("generic technology path holds the equilibrium invariants") {
  // alpha = 0.75 has no closed form anywhere: every quantity below runs
  // through the root-finding and quadrature paths only
  const ContestConfig config(2, 1.5, CostDistribution::uniform(1.0, 2.0),
                             EffortTechnology::power(0.75), 5);
  const auto s = opf_strategy(config);
  CHECK(s.xi_lo() > 0.0);
  CHECK(s.xi_lo() < s.xi_hi());
  double prev = s.beta(1.0);
  for (int k = 1; k <= 64; ++k) {
    const double b = s.beta(1.0 + k / 64.0);
    CHECK(b < prev);
    prev = b;
  }
  // the defining equation itself: h'(beta(c)) * (c + F/f) = nu
  for (double c : {1.0, 1.3, 1.7, 2.0}) {
    CHECK(config.tech.h_prime(s.beta(c)) * virtual_cost(config.dist, c) ==
          doctest::Approx(config.nu).epsilon(1e-9));
  }
  const double profit = opf_profit(config);
  const double welfare = opf_welfare(config);
  CHECK(profit > 0.0);
  CHECK(welfare > 0.0);
  CHECK(std::isfinite(profit));
  CHECK(std::isfinite(welfare));
  // envelope consistency ties strategy, prize and win probability together
  for (double c : {1.0, 1.25, 1.5, 1.75, 2.0}) {
    CHECK_NOTHROW(expected_utility(config, s, c));
  }
  const auto sol = solve(config);
  CHECK(sol.prize(s.xi_lo() * 1.2) > 0.0);
}

TEST_CASE("closed-form derivative override feeds the prize integral") {
  const auto config = baseline_config(1.0);
  auto s = opf_strategy(config);
  // correct override: d beta_inv / d xi = -nu / (4 xi^2)
  s.set_beta_inv_deriv([](double xi) { return -1.0 / (4.0 * xi * xi); });
  CHECK(opf_prize(config, s, 0.4) ==
        doctest::Approx(oracles::prize_cf(0.4, 1.0)).epsilon(1e-6));
  CHECK_NOTHROW(expected_utility(config, s, 1.5));
}

TEST_CASE("expected utility flags an inconsistent derivative route") {
  const auto config = baseline_config(1.0);
  auto broken = opf_strategy(config);
  // a wrong closed-form override corrupts the prize integral, so the direct
  // route must disagree with the envelope route beyond tolerance
  broken.set_beta_inv_deriv([](double xi) { return -1.0 / (8.0 * xi * xi); });
  CHECK_THROWS_AS(expected_utility(config, broken, 1.5), NumericalError);
}

TEST_CASE("profit and welfare scale as nu squared") {
  double base_profit = 0.0, base_welfare = 0.0;
  for (double nu : {0.5, 1.0, 2.0, 3.5, 5.0}) {
    const double p = opf_profit(baseline_config(nu)) / (nu * nu);
    const double w = opf_welfare(baseline_config(nu)) / (nu * nu);
    if (base_profit == 0.0) {
      base_profit = p;
      base_welfare = w;
    } else {
      CHECK(std::abs(p - base_profit) <= 1e-6);
      CHECK(std::abs(w - base_welfare) <= 1e-6);
    }
  }
}

TEST_CASE("solve bundles a valid prize schedule") {
  const auto sol = solve(baseline_config(1.0));
  CHECK(sol.prize.kind() == PrizeSchedule::Kind::kFunction);
  CHECK(sol.prize.xi_lo() == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(sol.prize.xi_hi() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sol.profit == doctest::Approx(oracles::profit_coeff()).epsilon(1e-8));
  CHECK(sol.welfare == doctest::Approx(oracles::welfare_coeff()).epsilon(1e-7));
  CHECK(sol.prize(0.3) == doctest::Approx(oracles::prize_cf(0.3, 1.0)).epsilon(1e-4));
}

TEST_SUITE_END();
