#include "tullock/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <string>
#include <thread>

#include "tullock/rng.hpp"

namespace tullock::sim {

namespace {

constexpr long kChunk = 1 << 15;
constexpr int kUtilitySamples = 256;

// Kahan-compensated accumulator; chunks are combined in fixed order so the
// result does not depend on the thread schedule.
struct Accum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  void merge(const Accum& o) {
    add(o.sum);
    add(-o.comp);
  }
};

struct MomentAccum {
  Accum sum, sumsq;
  void add(double x) {
    sum.add(x);
    sumsq.add(x * x);
  }
  void merge(const MomentAccum& o) {
    sum.merge(o.sum);
    sumsq.merge(o.sumsq);
  }
  double mean(long n) const { return sum.sum / static_cast<double>(n); }
  double std_error(long n) const {
    if (n < 2) return 0.0;
    const double var =
        std::max(0.0, (sumsq.sum - sum.sum * sum.sum / n) / (n - 1));
    return std::sqrt(var / n);
  }
};

// Fast prize evaluator for hot loops: function-kind schedules are tabulated
// once on a dense grid (exact evaluations, linear interpolation in between;
// the bias is orders of magnitude below Monte-Carlo noise).
class PrizeEvaluator {
 public:
  explicit PrizeEvaluator(const PrizeSchedule& prize) : prize_(prize) {
    if (prize.kind() == PrizeSchedule::Kind::kFunction) {
      table_.resize(kTable + 1);
      lo_ = prize.xi_lo();
      span_ = prize.xi_hi() - prize.xi_lo();
      for (int k = 0; k <= kTable; ++k) {
        table_[k] = prize_(lo_ + span_ * k / kTable);
      }
    }
  }

  double operator()(double xi) const {
    if (table_.empty()) return prize_(xi);
    // absorb 1-ulp interpolation overshoot at the support edges
    const double slack = 1e-9 * span_;
    if (xi < lo_ - slack || xi > lo_ + span_ + slack) {
      throw DomainError("simulate: contribution xi=" + std::to_string(xi) +
                        " outside the prize support");
    }
    const double t = std::clamp((xi - lo_) / span_, 0.0, 1.0) * kTable;
    const int k = std::clamp(static_cast<int>(t), 0, kTable - 1);
    return table_[k] + (t - k) * (table_[k + 1] - table_[k]);
  }

 private:
  static constexpr int kTable = 4096;
  PrizeSchedule prize_;
  std::vector<double> table_;
  double lo_ = 0.0, span_ = 1.0;
};

// Strategy table over the cost support for opponent evaluation in the
// Monte-Carlo loops (the probe points are exact strategy evaluations).
class StrategyEvaluator {
 public:
  StrategyEvaluator(const CostDistribution& dist, const StrategyFn& strategy)
      : lo_(dist.c_lo()), span_(dist.c_hi() - dist.c_lo()) {
    table_.resize(kTable + 1);
    for (int k = 0; k <= kTable; ++k) {
      table_[k] = strategy(lo_ + span_ * k / kTable);
    }
  }

  double operator()(double c) const {
    const double t = (c - lo_) / span_ * kTable;
    const int k = std::clamp(static_cast<int>(t), 0, kTable - 1);
    return table_[k] + (t - k) * (table_[k + 1] - table_[k]);
  }

 private:
  static constexpr int kTable = 4096;
  std::vector<double> table_;
  double lo_, span_;
};

template <typename ChunkFn, typename State>
void run_chunked(long trials, State init, ChunkFn chunk_fn,
                 std::vector<State>& out) {
  const long chunks = (trials + kChunk - 1) / kChunk;
  out.assign(chunks, init);
  const unsigned workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         static_cast<unsigned>(chunks));
  std::vector<std::future<void>> futures;
  std::atomic<long> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&]() {
      for (long c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
        const long begin = c * kChunk;
        const long end = std::min(trials, begin + kChunk);
        chunk_fn(begin, end, out[c]);
      }
    }));
  }
  for (auto& f : futures) f.get();
}

}  // namespace

SimulationReport run(const ContestConfig& config, const StrategyFn& strategy,
                     const PrizeSchedule& prize, long trials) {
  if (trials < 1) throw ValidationError("simulate::run: requires trials >= 1");
  if (!strategy) throw ValidationError("simulate::run: strategy required");

  const PrizeEvaluator prize_at(prize);
  const StrategyEvaluator beta_at(config.dist, strategy);
  const CounterRng rng(config.seed);
  const int n = config.n;

  // Pre-check: the strategy must map the support into the prize domain.
  for (int k = 0; k <= 64; ++k) {
    const double c =
        config.dist.c_lo() + (config.dist.c_hi() - config.dist.c_lo()) * k / 64.0;
    const double xi = strategy(c);
    if (!(xi > 0.0)) {
      throw ValidationError(
          "simulate::run: strategy must be strictly positive on the support "
          "(an all-zero profile is not an equilibrium)");
    }
    if (!prize.in_domain(xi)) {
      throw DomainError("simulate::run: strategy output xi=" + std::to_string(xi) +
                        " outside the prize domain");
    }
  }

  struct ChunkState {
    MomentAccum revenue, prize_paid, profit, welfare, contribution;
    std::vector<std::pair<double, double>> samples;
  };

  std::vector<ChunkState> states;
  run_chunked(
      trials, ChunkState{},
      [&](long begin, long end, ChunkState& st) {
        std::vector<double> c(n), xi(n), cost(n);
        for (long t = begin; t < end; ++t) {
          double total = 0.0;
          for (int i = 0; i < n; ++i) {
            c[i] = config.dist.inv_cdf(rng.uniform(t, i));
            xi[i] = beta_at(c[i]);
            cost[i] = config.tech.h(xi[i]) * c[i];
            total += xi[i];
          }
          // winner lottery on stream n
          int winner = -1;
          if (total > 0.0) {
            double u = rng.uniform(t, n) * total;
            for (int i = 0; i < n; ++i) {
              u -= xi[i];
              if (u <= 0.0) {
                winner = i;
                break;
              }
            }
            if (winner < 0) winner = n - 1;
          }
          const double paid = winner >= 0 ? prize_at(xi[winner]) : 0.0;
          const double revenue = config.nu * total;
          double welfare = paid;  // the winner's prize is the players' gain
          for (int i = 0; i < n; ++i) welfare -= cost[i];
          st.revenue.add(revenue);
          st.prize_paid.add(paid);
          st.profit.add(revenue - paid);
          st.welfare.add(welfare);
          st.contribution.add(total);
          if (t < kUtilitySamples) {
            const double u0 = (winner == 0 ? paid : 0.0) - cost[0];
            st.samples.emplace_back(c[0], u0);
          }
        }
      },
      states);

  ChunkState total;
  for (const auto& st : states) {
    total.revenue.merge(st.revenue);
    total.prize_paid.merge(st.prize_paid);
    total.profit.merge(st.profit);
    total.welfare.merge(st.welfare);
    total.contribution.merge(st.contribution);
    total.samples.insert(total.samples.end(), st.samples.begin(),
                         st.samples.end());
  }

  SimulationReport report;
  report.trials = trials;
  report.mean_revenue = total.revenue.mean(trials);
  report.mean_prize_paid = total.prize_paid.mean(trials);
  report.mean_profit = total.profit.mean(trials);
  report.mean_welfare = total.welfare.mean(trials);
  report.mean_total_contribution = total.contribution.mean(trials);
  report.se_revenue = total.revenue.std_error(trials);
  report.se_prize_paid = total.prize_paid.std_error(trials);
  report.se_profit = total.profit.std_error(trials);
  report.se_welfare = total.welfare.std_error(trials);
  report.per_type_utility = std::move(total.samples);
  return report;
}

double best_response_gap(const ContestConfig& config, const StrategyFn& strategy,
                         const PrizeSchedule& prize, double c,
                         std::span<const double> deviation_grid, long trials) {
  if (trials < 1) throw ValidationError("best_response_gap: requires trials >= 1");
  if (!config.dist.contains(c)) {
    throw DomainError("best_response_gap: c outside support");
  }
  for (double d : deviation_grid) {
    if (!prize.in_domain(d)) {
      throw DomainError("best_response_gap: deviation xi=" + std::to_string(d) +
                        " outside the prize domain (off-support prizes are "
                        "undefined)");
    }
  }

  const StrategyEvaluator beta_at(config.dist, strategy);
  const CounterRng rng(config.seed);
  const int n = config.n;

  // Candidate contributions: the equilibrium play first, then deviations.
  std::vector<double> cand(1 + deviation_grid.size());
  cand[0] = strategy(c);
  if (!prize.in_domain(cand[0])) {
    throw DomainError("best_response_gap: strategy(c) outside the prize domain");
  }
  std::copy(deviation_grid.begin(), deviation_grid.end(), cand.begin() + 1);
  std::vector<double> prize_at(cand.size()), effort_cost(cand.size());
  for (std::size_t k = 0; k < cand.size(); ++k) {
    prize_at[k] = prize(cand[k]);
    effort_cost[k] = config.tech.h(cand[k]) * c;
  }

  // Shared opponent draws across all candidates (common random numbers);
  // the lottery is integrated out analytically.
  struct ChunkState {
    std::vector<Accum> win_terms;
  };
  std::vector<ChunkState> states;
  run_chunked(
      trials, ChunkState{std::vector<Accum>(cand.size())},
      [&](long begin, long end, ChunkState& st) {
        for (long t = begin; t < end; ++t) {
          double opponents = 0.0;
          for (int j = 1; j < n; ++j) {
            opponents += beta_at(config.dist.inv_cdf(rng.uniform(t, j)));
          }
          for (std::size_t k = 0; k < cand.size(); ++k) {
            st.win_terms[k].add(cand[k] / (cand[k] + opponents) * prize_at[k]);
          }
        }
      },
      states);

  std::vector<Accum> win_terms(cand.size());
  for (const auto& st : states) {
    for (std::size_t k = 0; k < cand.size(); ++k) {
      win_terms[k].merge(st.win_terms[k]);
    }
  }

  const double base =
      win_terms[0].sum / static_cast<double>(trials) - effort_cost[0];
  double gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < cand.size(); ++k) {
    const double u =
        win_terms[k].sum / static_cast<double>(trials) - effort_cost[k];
    gap = std::max(gap, u - base);
  }
  return gap;
}

std::vector<UtilityPoint> empirical_utility_curve(const ContestConfig& config,
                                                  const StrategyFn& strategy,
                                                  const PrizeSchedule& prize,
                                                  std::span<const double> c_grid,
                                                  long trials) {
  if (trials < 1) {
    throw ValidationError("empirical_utility_curve: requires trials >= 1");
  }
  const StrategyEvaluator beta_at(config.dist, strategy);
  const CounterRng rng(config.seed);
  const int n = config.n;

  std::vector<double> xi(c_grid.size()), prize_at(c_grid.size());
  for (std::size_t k = 0; k < c_grid.size(); ++k) {
    if (!config.dist.contains(c_grid[k])) {
      throw DomainError("empirical_utility_curve: c outside support");
    }
    xi[k] = strategy(c_grid[k]);
    if (!prize.in_domain(xi[k])) {
      throw DomainError("empirical_utility_curve: strategy output outside the "
                        "prize domain");
    }
    prize_at[k] = prize(xi[k]);
  }

  std::vector<MomentAccum> chunk_init(c_grid.size());
  std::vector<std::vector<MomentAccum>> states;
  run_chunked(
      trials, chunk_init,
      [&](long begin, long end, std::vector<MomentAccum>& st) {
        for (long t = begin; t < end; ++t) {
          double opponents = 0.0;
          for (int j = 1; j < n; ++j) {
            opponents += beta_at(config.dist.inv_cdf(rng.uniform(t, j)));
          }
          for (std::size_t k = 0; k < st.size(); ++k) {
            st[k].add(xi[k] / (xi[k] + opponents) * prize_at[k] -
                      config.tech.h(xi[k]) * c_grid[k]);
          }
        }
      },
      states);

  std::vector<MomentAccum> total(c_grid.size());
  for (const auto& st : states) {
    for (std::size_t k = 0; k < total.size(); ++k) total[k].merge(st[k]);
  }

  std::vector<UtilityPoint> out(c_grid.size());
  for (std::size_t k = 0; k < total.size(); ++k) {
    out[k] = {c_grid[k], total[k].mean(trials), total[k].std_error(trials)};
  }
  return out;
}

}  // namespace tullock::sim
