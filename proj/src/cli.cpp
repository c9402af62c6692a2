#include "tullock/cli.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tullock/fixed_prize.hpp"
#include "tullock/io.hpp"
#include "tullock/numerics.hpp"
#include "tullock/opf.hpp"
#include "tullock/simulate.hpp"

namespace tullock::cli {

namespace {

using nlohmann::json;

Scenario load_scenario(const Options& opt) {
  Scenario s = Scenario::load(opt.scenario_path);
  if (opt.seed_override) s.seed = *opt.seed_override;
  if (opt.m_override) {
    if (*opt.m_override < 2) throw ValidationError("--m must be >= 2");
    s.benchmark.m = *opt.m_override;
  }
  return s;
}

std::string nu_tag(double nu) { return io::format_number(nu); }

json scenario_header(const Scenario& s) {
  return json{{"scenario", s.name},
              {"n", s.n},
              {"seed", s.seed},
              {"distribution", s.dist_kind},
              {"technology", s.tech_kind}};
}

/// Strategy CSV on the quadrature grid: c, beta(c), xi, V*(xi), p(xi).
void write_opf_strategy_csv(const std::filesystem::path& path,
                            const ContestConfig& config,
                            const opf::OpfSolution& sol, int m) {
  const auto grid = numerics::QuadratureGrid::uniform(config.dist.c_lo(),
                                                      config.dist.c_hi(), m);
  io::CsvWriter csv({"c", "beta_c", "xi", "V_star", "p_xi"});
  for (double c : grid.points) {
    const double xi = sol.strategy.beta(c);
    const double v = opf_prize(config, sol.strategy, xi);
    const double p = opf::win_prob(config, sol.strategy, xi).value;
    csv.row({c, xi, xi, v, p});
  }
  csv.write(path);
}

struct OpfRun {
  double nu = 0.0;
  double profit = 0.0;
  double welfare = 0.0;
  double xi_lo = 0.0;
  double xi_hi = 0.0;
};

std::vector<OpfRun> solve_opf_all(const Scenario& scenario, const Options& opt,
                                  bool write_files) {
  std::vector<OpfRun> runs;
  for (double nu : scenario.nu_values()) {
    const ContestConfig config = scenario.make_config(nu);
    const opf::OpfSolution sol = opf::solve(config);
    if (write_files) {
      write_opf_strategy_csv(
          opt.out_dir / ("opf_strategy_nu" + nu_tag(nu) + ".csv"), config, sol,
          scenario.benchmark.m);
    }
    runs.push_back({nu, sol.profit, sol.welfare, sol.strategy.xi_lo(),
                    sol.strategy.xi_hi()});
  }
  return runs;
}

void write_opf_summary(const Scenario& scenario, const Options& opt,
                       const std::vector<OpfRun>& runs) {
  json summary = scenario_header(scenario);
  summary["rows"] = json::array();
  for (const auto& r : runs) {
    summary["rows"].push_back({{"nu", io::snap_number(r.nu)},
                               {"profit", io::snap_number(r.profit)},
                               {"welfare", io::snap_number(r.welfare)},
                               {"xi_lo", io::snap_number(r.xi_lo)},
                               {"xi_hi", io::snap_number(r.xi_hi)}});
  }
  io::write_text_atomic(opt.out_dir / "opf_summary.json", summary.dump(2) + "\n");
}

std::vector<fixed_prize::FixedPrizeSolution> optimize_all(const Scenario& scenario) {
  const auto nus = scenario.nu_values();
  std::vector<std::future<fixed_prize::FixedPrizeSolution>> futures;
  futures.reserve(nus.size());
  for (double nu : nus) {
    futures.push_back(std::async(std::launch::async, [&scenario, nu]() {
      return fixed_prize::optimize(scenario.make_config(nu), scenario.benchmark);
    }));
  }
  std::vector<fixed_prize::FixedPrizeSolution> out;
  out.reserve(nus.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

void write_benchmark_files(const Scenario& scenario, const Options& opt,
                           const std::vector<fixed_prize::FixedPrizeSolution>& sols) {
  io::CsvWriter trajectory({"nu", "V0", "profit"});
  json summary = scenario_header(scenario);
  summary["rows"] = json::array();
  for (const auto& sol : sols) {
    for (const auto& [v0, profit] : sol.trajectory) {
      trajectory.row({sol.nu, v0, profit});
    }
    io::CsvWriter eq({"c_i", "xi_i"});
    for (std::size_t i = 0; i < sol.equilibrium.xi.size(); ++i) {
      eq.row({sol.equilibrium.grid.points[i], sol.equilibrium.xi[i]});
    }
    eq.write(opt.out_dir / ("benchmark_equilibrium_nu" + nu_tag(sol.nu) + ".csv"));
    summary["rows"].push_back(
        {{"nu", io::snap_number(sol.nu)},
         {"v0_star", io::snap_number(sol.v0_star)},
         {"pi0_star", io::snap_number(sol.pi0_star)},
         {"welfare", io::snap_number(fixed_prize::welfare_estimate(sol.equilibrium))},
         {"residual", io::snap_number(sol.equilibrium.residual)}});
  }
  trajectory.write(opt.out_dir / "benchmark_trajectory.csv");
  io::write_text_atomic(opt.out_dir / "benchmark_summary.json", summary.dump(2) + "\n");
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int cmd_solve_opf(const Options& opt) {
  return guarded([&] {
    const Scenario scenario = load_scenario(opt);
    const auto runs = solve_opf_all(scenario, opt, /*write_files=*/true);
    write_opf_summary(scenario, opt, runs);
    std::cout << "solve-opf: wrote " << runs.size() << " strategy file(s) to "
              << opt.out_dir.string() << "\n";
  });
}

int cmd_optimize_benchmark(const Options& opt) {
  return guarded([&] {
    const Scenario scenario = load_scenario(opt);
    const auto sols = optimize_all(scenario);
    write_benchmark_files(scenario, opt, sols);
    std::cout << "optimize-benchmark: optimized " << sols.size()
              << " valuation(s), files in " << opt.out_dir.string() << "\n";
  });
}

int cmd_compare(const Options& opt) {
  return guarded([&] {
    const Scenario scenario = load_scenario(opt);
    const auto opf_runs = solve_opf_all(scenario, opt, /*write_files=*/true);
    write_opf_summary(scenario, opt, opf_runs);
    const auto bench = optimize_all(scenario);
    write_benchmark_files(scenario, opt, bench);

    const int m = scenario.benchmark.m;
    io::CsvWriter table({"nu", "profit_benchmark", "profit_opf", "profit_ratio",
                         "welfare_benchmark", "welfare_opf", "welfare_ratio"});
    io::CsvWriter fig3a({"nu", "c", "beta_opf", "beta_benchmark"});
    io::CsvWriter fig3b({"nu", "xi", "V_star", "V0_star"});
    io::CsvWriter fig3c({"nu", "profit_opf", "profit_benchmark"});
    io::CsvWriter fig4({"nu", "welfare_opf", "welfare_benchmark"});
    json summary = scenario_header(scenario);
    summary["rows"] = json::array();

    for (std::size_t k = 0; k < opf_runs.size(); ++k) {
      const auto& o = opf_runs[k];
      const auto& b = bench[k];
      const ContestConfig config = scenario.make_config(o.nu);
      const opf::OpfStrategy strategy = opf::opf_strategy(config);

      // Ratio columns are quotients of the printed (10-digit) columns, so
      // the emitted table is internally consistent at full precision.
      ComparisonRow row;
      row.nu = io::snap_number(o.nu);
      row.profit_benchmark = io::snap_number(b.pi0_star);
      row.profit_opf = io::snap_number(o.profit);
      row.profit_ratio = io::snap_number(row.profit_opf / row.profit_benchmark);
      row.welfare_benchmark =
          io::snap_number(fixed_prize::welfare_estimate(b.equilibrium));
      row.welfare_opf = io::snap_number(o.welfare);
      row.welfare_ratio = io::snap_number(row.welfare_opf / row.welfare_benchmark);
      table.row({row.nu, row.profit_benchmark, row.profit_opf, row.profit_ratio,
                 row.welfare_benchmark, row.welfare_opf, row.welfare_ratio});
      fig3c.row({row.nu, row.profit_opf, row.profit_benchmark});
      fig4.row({row.nu, row.welfare_opf, row.welfare_benchmark});

      for (int i = 0; i < m; ++i) {
        const double c = b.equilibrium.grid.points[i];
        fig3a.row({o.nu, c, strategy.beta(c), b.equilibrium.xi[i]});
      }

      // prize curves sampled across the function-prize support; linear-fit
      // quality recorded as a diagnostic (no hard threshold)
      double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
      std::vector<std::pair<double, double>> vs;
      for (int i = 0; i < m; ++i) {
        const double xi =
            o.xi_lo + (o.xi_hi - o.xi_lo) * i / std::max(1, m - 1);
        const double v = opf_prize(config, strategy, xi);
        fig3b.row({o.nu, xi, v, b.v0_star});
        sx += xi; sy += v; sxx += xi * xi; sxy += xi * v; syy += v * v;
        vs.emplace_back(xi, v);
      }
      const double denom = m * sxx - sx * sx;
      const double slope = (m * sxy - sx * sy) / denom;
      const double intercept = (sy - slope * sx) / m;
      double ss_res = 0.0, ss_tot = 0.0;
      for (const auto& [xi, v] : vs) {
        ss_res += (v - (intercept + slope * xi)) * (v - (intercept + slope * xi));
        ss_tot += (v - sy / m) * (v - sy / m);
      }
      const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

      const auto& grid = b.equilibrium.grid.points;
      const double uplift_low_cost =
          (strategy.beta(grid.front()) / b.equilibrium.xi.front() - 1.0) * 100.0;
      const double uplift_high_cost =
          (strategy.beta(grid.back()) / b.equilibrium.xi.back() - 1.0) * 100.0;

      summary["rows"].push_back(
          {{"nu", row.nu},
           {"profit_ratio", row.profit_ratio},
           {"welfare_ratio", row.welfare_ratio},
           {"strategy_uplift_pct_low_cost", io::snap_number(uplift_low_cost)},
           {"strategy_uplift_pct_high_cost", io::snap_number(uplift_high_cost)},
           {"prize_linear_fit_r2", io::snap_number(r2)}});
    }

    table.write(opt.out_dir / "compare_table.csv");
    fig3a.write(opt.out_dir / "fig3a_strategy.csv");
    fig3b.write(opt.out_dir / "fig3b_prize.csv");
    fig3c.write(opt.out_dir / "fig3c_profit.csv");
    fig4.write(opt.out_dir / "fig4_welfare.csv");
    io::write_text_atomic(opt.out_dir / "compare_summary.json",
                          summary.dump(2) + "\n");
    std::cout << "compare: wrote comparison table and figure data to "
              << opt.out_dir.string() << "\n";
  });
}

int cmd_simulate(const Options& opt) {
  return guarded([&] {
    const Scenario scenario = load_scenario(opt);
    if (opt.trials < 1) throw ValidationError("--trials must be >= 1");
    json summary = scenario_header(scenario);
    summary["mechanism"] = opt.mechanism;
    summary["trials"] = opt.trials;
    summary["rows"] = json::array();
    io::CsvWriter curve({"nu", "c", "utility", "std_err"});

    for (double nu : scenario.nu_values()) {
      const ContestConfig config = scenario.make_config(nu);
      sim::StrategyFn strategy;
      std::optional<PrizeSchedule> prize;
      if (opt.mechanism == "opf") {
        const opf::OpfSolution sol = opf::solve(config);
        const opf::OpfStrategy strat = sol.strategy;
        strategy = [strat](double c) { return strat.beta(c); };
        prize = sol.prize;
      } else if (opt.mechanism == "benchmark") {
        if (config.n != 2) {
          throw ValidationError("simulate: benchmark mechanism requires n=2");
        }
        auto sol = fixed_prize::optimize(config, scenario.benchmark);
        const auto eq = sol.equilibrium;
        strategy = [eq](double c) {
          const auto& pts = eq.grid.points;
          if (c <= pts.front()) return eq.xi.front();
          if (c >= pts.back()) return eq.xi.back();
          const double t = (c - pts.front()) / eq.grid.weight;
          const std::size_t k =
              std::min(static_cast<std::size_t>(t), eq.xi.size() - 2);
          return eq.xi[k] + (t - k) * (eq.xi[k + 1] - eq.xi[k]);
        };
        prize = PrizeSchedule::constant(sol.v0_star);
      } else {
        throw ValidationError("simulate: unknown mechanism '" + opt.mechanism +
                              "' (use opf or benchmark)");
      }

      const sim::SimulationReport report =
          sim::run(config, strategy, *prize, opt.trials);
      summary["rows"].push_back(
          {{"nu", io::snap_number(nu)},
           {"mean_revenue", io::snap_number(report.mean_revenue)},
           {"mean_prize_paid", io::snap_number(report.mean_prize_paid)},
           {"mean_profit", io::snap_number(report.mean_profit)},
           {"mean_welfare", io::snap_number(report.mean_welfare)},
           {"se_revenue", io::snap_number(report.se_revenue)},
           {"se_prize_paid", io::snap_number(report.se_prize_paid)},
           {"se_profit", io::snap_number(report.se_profit)},
           {"se_welfare", io::snap_number(report.se_welfare)}});

      std::vector<double> c_grid;
      for (int k = 0; k <= 20; ++k) {
        c_grid.push_back(config.dist.c_lo() +
                         (config.dist.c_hi() - config.dist.c_lo()) * k / 20.0);
      }
      for (const auto& pt :
           sim::empirical_utility_curve(config, strategy, *prize, c_grid,
                                        opt.trials)) {
        curve.row({nu, pt.c, pt.utility, pt.std_error});
      }
    }
    io::write_text_atomic(opt.out_dir / "simulation_report.json",
                          summary.dump(2) + "\n");
    curve.write(opt.out_dir / "utility_curve.csv");
    std::cout << "simulate: report in " << opt.out_dir.string() << "\n";
  });
}

namespace {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

void report_check(std::vector<Check>& checks, const std::string& name, bool ok,
                  const std::string& detail) {
  checks.push_back({name, ok, detail});
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
}

}  // namespace

int cmd_verify(const Options& opt) {
  return guarded([&] {
    const Scenario scenario = load_scenario(opt);
    const double nu = scenario.nu_values().front();
    const ContestConfig config = scenario.make_config(nu);
    const double c_lo = config.dist.c_lo(), c_hi = config.dist.c_hi();
    const double span = c_hi - c_lo;
    std::vector<Check> checks;

    const opf::OpfSolution sol = opf::solve(config);
    const opf::OpfStrategy& strategy = sol.strategy;
    const double factor = opt.perturb_strategy;
    const double xi_lo = strategy.xi_lo(), xi_hi = strategy.xi_hi();
    // Perturbed strategies are clamped into the prize support: off-support
    // prizes are undefined, so deviation analysis stays within it. A zero
    // factor is passed through as the all-zero profile for the validator.
    const double floor = factor == 0.0 ? 0.0 : xi_lo;
    const sim::StrategyFn play = [&strategy, factor, floor, xi_hi](double c) {
      return std::clamp(strategy.beta(c) * factor, floor, xi_hi);
    };

    // accounting identity of the simulator
    {
      const auto report = sim::run(config, play, sol.prize, opt.trials);
      const double delta =
          std::abs(report.mean_profit - (config.nu * report.mean_total_contribution -
                                         report.mean_prize_paid));
      report_check(checks, "accounting-identity", delta <= 1e-12,
                   "|profit - (nu*contribution - prize)| = " +
                       io::format_number(delta));
    }

    // SIR: positive utility below the top cost, zero at the top cost
    {
      std::vector<double> c_grid;
      for (int k = 0; k < 10; ++k) c_grid.push_back(c_lo + span * k / 10.0);
      c_grid.push_back(c_hi);
      const auto curve = sim::empirical_utility_curve(config, play, sol.prize,
                                                      c_grid, opt.trials);
      bool ok = true;
      std::string detail;
      for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
        if (!(curve[k].utility > 0.0)) {
          ok = false;
          detail = "u(" + io::format_number(curve[k].c) + ") = " +
                   io::format_number(curve[k].utility) + " not positive";
          break;
        }
      }
      const auto& top = curve.back();
      if (ok && std::abs(top.utility) > 3.0 * top.std_error) {
        ok = false;
        detail = "|u(c_hi)| = " + io::format_number(std::abs(top.utility)) +
                 " > 3*se = " + io::format_number(3.0 * top.std_error);
      }
      if (ok) {
        detail = "u > 0 below c_hi; |u(c_hi)| = " +
                 io::format_number(std::abs(top.utility)) + " <= 3*se";
      }
      report_check(checks, "sir", ok, detail);
    }

    // n-agnosticism of the equilibrium strategy
    {
      double worst = 0.0;
      const opf::OpfStrategy s5 = opf::opf_strategy(config.with_n(5));
      const opf::OpfStrategy s10 = opf::opf_strategy(config.with_n(10));
      for (int k = 0; k <= 64; ++k) {
        const double c = c_lo + span * k / 64.0;
        const double b = strategy.beta(c);
        worst = std::max({worst, std::abs(b - s5.beta(c)),
                          std::abs(b - s10.beta(c))});
      }
      report_check(checks, "n-agnosticism", worst <= 1e-10,
                   "max |beta_n - beta_2| = " + io::format_number(worst));
    }

    // strictly decreasing strategy
    {
      bool ok = true;
      double prev = play(c_lo);
      for (int k = 1; k <= 256 && ok; ++k) {
        const double b = play(c_lo + span * k / 256.0);
        ok = b <= prev + 1e-12;
        prev = b;
      }
      report_check(checks, "monotone-strategy", ok,
                   ok ? "nonincreasing on 256-point grid" : "increase detected");
    }

    // two-route expected-utility consistency
    {
      bool ok = true;
      std::string detail = "direct vs envelope within 1e-3 on 50 types";
      try {
        for (int k = 0; k < 50; ++k) {
          opf::expected_utility(config, strategy, c_lo + span * k / 49.0);
        }
      } catch (const NumericalError& e) {
        ok = false;
        detail = e.what();
      }
      report_check(checks, "envelope-consistency", ok, detail);
    }

    // best-response gap of the OPF mechanism
    {
      std::vector<double> deviations(64);
      for (int k = 0; k < 64; ++k) {
        deviations[k] = xi_lo + (xi_hi - xi_lo) * k / 63.0;
      }
      double worst = -1e300;
      for (int k = 0; k < 10; ++k) {
        const double c = c_lo + span * (k + 0.5) / 10.0;
        worst = std::max(worst, sim::best_response_gap(config, play, sol.prize, c,
                                                       deviations, opt.trials));
      }
      report_check(checks, "best-response-opf", worst <= 3e-3,
                   "max gap = " + io::format_number(worst));
    }

    if (config.n == 2) {
      // best-response gap of the optimized fixed-prize benchmark
      const auto bench = fixed_prize::optimize(config, scenario.benchmark);
      const auto eq = bench.equilibrium;
      const sim::StrategyFn bench_play = [eq](double c) {
        const auto& pts = eq.grid.points;
        if (c <= pts.front()) return eq.xi.front();
        if (c >= pts.back()) return eq.xi.back();
        const double t = (c - pts.front()) / eq.grid.weight;
        const std::size_t k =
            std::min(static_cast<std::size_t>(t), eq.xi.size() - 2);
        return eq.xi[k] + (t - k) * (eq.xi[k + 1] - eq.xi[k]);
      };
      const PrizeSchedule v0 = PrizeSchedule::constant(bench.v0_star);
      std::vector<double> deviations(64);
      for (int k = 0; k < 64; ++k) {
        deviations[k] =
            eq.xi.back() + (eq.xi.front() - eq.xi.back()) * k / 63.0;
      }
      double worst = -1e300;
      for (int k = 0; k < 10; ++k) {
        const double c = c_lo + span * (k + 0.5) / 10.0;
        worst = std::max(worst, sim::best_response_gap(config, bench_play, v0, c,
                                                       deviations, opt.trials));
      }
      report_check(checks, "best-response-benchmark", worst <= 3e-3,
                   "max gap = " + io::format_number(worst) +
                       " at V0* = " + io::format_number(bench.v0_star));

      // discretization convergence of the grid equilibrium
      const int m = scenario.benchmark.m;
      const auto eq_m = fixed_prize::solve_equilibrium(config, 1.0, m);
      const auto eq_2m = fixed_prize::solve_equilibrium(config, 1.0, 2 * m);
      double worst_dx = 0.0;
      for (int j = 0; j < m; ++j) {
        worst_dx = std::max(worst_dx, std::abs(eq_m.xi[j] - eq_2m.xi[2 * j]));
      }
      report_check(checks, "discretization-convergence", worst_dx <= 1e-3,
                   "max |xi_m - xi_2m| = " + io::format_number(worst_dx) +
                       " (m=" + std::to_string(m) + ")");
    } else {
      std::cout << "[SKIP] benchmark checks (n != 2)\n";
    }

    json report = scenario_header(scenario);
    report["nu"] = io::snap_number(nu);
    report["trials"] = opt.trials;
    if (factor != 1.0) report["perturb_strategy"] = factor;
    report["checks"] = json::array();
    bool all_ok = true;
    for (const auto& c : checks) {
      report["checks"].push_back(
          {{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
      all_ok = all_ok && c.passed;
    }
    report["passed"] = all_ok;
    io::write_text_atomic(opt.out_dir / "verify_report.json",
                          report.dump(2) + "\n");
    if (!all_ok) throw NumericalError("verify: one or more checks failed");
    std::cout << "verify: all checks passed\n";
  });
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Tullock contest design toolkit: prize-function mechanism, "
               "optimized fixed-prize benchmark, Monte-Carlo verification"};
  app.require_subcommand(1);

  Options opt;
  std::string scenario_str, out_str = "out";

  const auto add_common = [&](CLI::App* sub, bool needs_trials) {
    sub->add_option("--scenario", scenario_str, "scenario JSON file")->required();
    sub->add_option("--out", out_str, "output directory (default: out)");
    sub->add_option("--seed", opt.seed_override, "override the scenario seed");
    sub->add_option("--m", opt.m_override, "override the quadrature point count");
    if (needs_trials) {
      sub->add_option("--trials", opt.trials, "Monte-Carlo trials (default 1e6)");
    }
  };

  auto* solve = app.add_subcommand("solve-opf", "solve the prize-function mechanism");
  add_common(solve, false);
  auto* bench = app.add_subcommand("optimize-benchmark",
                                   "optimize the fixed-prize benchmark");
  add_common(bench, false);
  auto* compare = app.add_subcommand("compare", "compare both mechanisms");
  add_common(compare, false);
  auto* verify = app.add_subcommand("verify", "equilibrium property checks");
  add_common(verify, true);
  verify->add_option("--perturb-strategy", opt.perturb_strategy,
                     "scale the strategy (negative control; 1 = no change)");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo contest simulation");
  add_common(simulate, true);
  simulate->add_option("--mechanism", opt.mechanism, "opf or benchmark");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  opt.scenario_path = scenario_str;
  opt.out_dir = out_str;
  if (solve->parsed()) return cmd_solve_opf(opt);
  if (bench->parsed()) return cmd_optimize_benchmark(opt);
  if (compare->parsed()) return cmd_compare(opt);
  if (verify->parsed()) return cmd_verify(opt);
  if (simulate->parsed()) return cmd_simulate(opt);
  return 1;
}

}  // namespace tullock::cli
