#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tullock/scenario.hpp"

namespace tullock::cli {

/// One row of the mechanism comparison table.
struct ComparisonRow {
  double nu = 0.0;
  double profit_benchmark = 0.0;
  double profit_opf = 0.0;
  double profit_ratio = 0.0;
  double welfare_benchmark = 0.0;
  double welfare_opf = 0.0;
  double welfare_ratio = 0.0;
};

struct Options {
  std::filesystem::path scenario_path;
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed_override;
  std::optional<int> m_override;
  long trials = 1'000'000;
  std::string mechanism = "opf";  // simulate: "opf" or "benchmark"
  double perturb_strategy = 1.0;  // verify: negative-control strategy scale
};

/// Exit codes: 0 success, 1 validation problem, 2 numerical failure.
int cmd_solve_opf(const Options& opt);
int cmd_optimize_benchmark(const Options& opt);
int cmd_compare(const Options& opt);
int cmd_verify(const Options& opt);
int cmd_simulate(const Options& opt);

/// Full argv interface (used by the binary and by end-to-end tests).
int run_cli(const std::vector<std::string>& args);

}  // namespace tullock::cli
