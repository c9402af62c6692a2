#include "tullock/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tullock {

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ValidationError(std::string("scenario: missing or non-numeric field '") +
                          key + "'");
  }
  return j[key].get<double>();
}

}  // namespace

std::vector<double> Scenario::nu_values() const {
  std::vector<double> out;
  if (nu_grid) {
    const auto& g = *nu_grid;
    for (int k = 0;; ++k) {
      const double v = g.lo + k * g.step;
      if (v > g.hi + 1e-9 * g.step) break;
      out.push_back(v);
    }
  } else if (nu) {
    out.push_back(*nu);
  }
  return out;
}

CostDistribution Scenario::make_distribution() const {
  if (dist_kind == "uniform") return CostDistribution::uniform(dist_a, dist_b);
  throw ValidationError("scenario: unknown distribution kind '" + dist_kind + "'");
}

EffortTechnology Scenario::make_technology() const {
  if (tech_kind == "power") return EffortTechnology::power(tech_alpha);
  throw ValidationError("scenario: unknown technology kind '" + tech_kind + "'");
}

ContestConfig Scenario::make_config(double nu_value) const {
  return make_config(nu_value, n);
}

ContestConfig Scenario::make_config(double nu_value, int n_override) const {
  return ContestConfig(n_override, nu_value, make_distribution(),
                       make_technology(), seed);
}

Scenario Scenario::from_json_text(const std::string& text) {
  try {
    return from_json_impl(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scenario: invalid JSON: ") + e.what());
  }
}

Scenario Scenario::from_json_impl(const std::string& text) {
  const json j = json::parse(text);

  Scenario s;
  if (j.contains("name")) s.name = j["name"].get<std::string>();
  if (j.contains("n")) s.n = j["n"].get<int>();
  if (s.n < 2) throw ValidationError("scenario: requires n >= 2");

  const bool has_nu = j.contains("nu");
  const bool has_grid = j.contains("nu_grid");
  if (has_nu == has_grid) {
    throw ValidationError("scenario: exactly one of 'nu' or 'nu_grid' required");
  }
  if (has_nu) {
    s.nu = require_number(j, "nu");
    if (!(*s.nu > 0.0)) throw ValidationError("scenario: nu must be > 0");
  } else {
    const auto& g = j["nu_grid"];
    Scenario::NuGrid grid{require_number(g, "lo"), require_number(g, "hi"),
                          require_number(g, "step")};
    if (!(grid.lo > 0.0) || !(grid.lo <= grid.hi) || !(grid.step > 0.0)) {
      throw ValidationError("scenario: nu_grid requires 0 < lo <= hi, step > 0");
    }
    s.nu_grid = grid;
  }

  if (!j.contains("distribution") || !j["distribution"].is_object()) {
    throw ValidationError("scenario: 'distribution' object required");
  }
  const auto& d = j["distribution"];
  s.dist_kind = d.value("kind", "");
  if (s.dist_kind == "uniform") {
    s.dist_a = require_number(d, "a");
    s.dist_b = require_number(d, "b");
  } else {
    throw ValidationError("scenario: unsupported distribution kind '" +
                          s.dist_kind + "' (supported: uniform)");
  }

  if (!j.contains("technology") || !j["technology"].is_object()) {
    throw ValidationError("scenario: 'technology' object required");
  }
  const auto& t = j["technology"];
  s.tech_kind = t.value("kind", "");
  if (s.tech_kind == "power") {
    s.tech_alpha = require_number(t, "alpha");
  } else {
    throw ValidationError("scenario: unsupported technology kind '" +
                          s.tech_kind + "' (supported: power)");
  }

  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();

  if (j.contains("benchmark")) {
    const auto& b = j["benchmark"];
    if (b.contains("v0_lo")) s.benchmark.v0_lo = require_number(b, "v0_lo");
    if (b.contains("v0_hi")) s.benchmark.v0_hi = require_number(b, "v0_hi");
    if (b.contains("v0_step")) s.benchmark.v0_step = require_number(b, "v0_step");
    if (b.contains("m")) s.benchmark.m = b["m"].get<int>();
    if (!(s.benchmark.v0_lo > 0.0) || !(s.benchmark.v0_lo < s.benchmark.v0_hi) ||
        !(s.benchmark.v0_step > 0.0) || s.benchmark.m < 2) {
      throw ValidationError("scenario: invalid benchmark parameters");
    }
  }

  // constructability check: every field combination must validate
  s.make_config(s.nu_values().front());
  return s;
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("scenario: cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

}  // namespace tullock
