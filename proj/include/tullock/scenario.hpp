#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tullock/contest.hpp"
#include "tullock/fixed_prize.hpp"

namespace tullock {

/// Scenario file schema (JSON):
///   {
///     "n": 2,
///     "nu": 1.0,                       // or "nu_grid": {"lo","hi","step"}
///     "distribution": {"kind": "uniform", "a": 1.0, "b": 2.0},
///     "technology":   {"kind": "power", "alpha": 0.5},
///     "seed": 42,
///     "benchmark": {"v0_lo","v0_hi","v0_step","m"}   // optional
///   }
struct Scenario {
  std::string name = "scenario";
  int n = 2;
  std::optional<double> nu;
  struct NuGrid {
    double lo = 0.0, hi = 0.0, step = 0.0;
  };
  std::optional<NuGrid> nu_grid;
  std::uint64_t seed = 0;
  fixed_prize::OptimizeParams benchmark;

  // distribution / technology descriptors, kept for reconstruction
  std::string dist_kind;
  double dist_a = 0.0, dist_b = 0.0;
  std::string tech_kind;
  double tech_alpha = 0.0;

  /// All valuation values: the grid expansion, or the single nu.
  std::vector<double> nu_values() const;

  CostDistribution make_distribution() const;
  EffortTechnology make_technology() const;
  ContestConfig make_config(double nu_value) const;
  ContestConfig make_config(double nu_value, int n_override) const;

  static Scenario from_json_text(const std::string& text);
  static Scenario load(const std::filesystem::path& path);

 private:
  static Scenario from_json_impl(const std::string& text);
};

}  // namespace tullock
