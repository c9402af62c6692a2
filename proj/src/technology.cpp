#include "tullock/technology.hpp"

#include <cmath>
#include <utility>

namespace tullock {

namespace {

constexpr int kProbePoints = 512;
constexpr double kProbeMax = 2.0;

void validate(const EffortTechnology& t) {
  if (std::abs(t.g(0.0)) > 1e-12) {
    throw ValidationError("EffortTechnology '" + t.name() + "': g(0) must be 0");
  }
  double prev_g = 0.0;
  for (int k = 1; k <= kProbePoints; ++k) {
    const double b = kProbeMax * k / kProbePoints;
    const double gb = t.g(b);
    if (!(gb > prev_g)) {
      throw ValidationError("EffortTechnology '" + t.name() +
                            "': g must be strictly increasing");
    }
    // midpoint concavity on consecutive probe points
    if (k >= 2) {
      const double b0 = kProbeMax * (k - 2) / kProbePoints;
      const double mid = t.g(0.5 * (b0 + b));
      if (mid + 1e-12 < 0.5 * (t.g(b0) + gb)) {
        throw ValidationError("EffortTechnology '" + t.name() +
                              "': g must be concave");
      }
    }
    if (std::abs(t.h(gb) - b) > 1e-9 * std::max(1.0, b)) {
      throw ValidationError("EffortTechnology '" + t.name() +
                            "': h(g(b)) != b near b=" + std::to_string(b));
    }
    prev_g = gb;
  }
  for (int k = 1; k < kProbePoints; ++k) {
    const double xi = kProbeMax * k / kProbePoints;
    const double half = 1e-5 * std::max(xi, 1e-3);
    const double fd = (t.h(xi + half) - t.h(xi - half)) / (2.0 * half);
    const double hp = t.h_prime(xi);
    if (std::abs(fd - hp) > 1e-6 * std::max(1.0, std::abs(hp))) {
      throw ValidationError("EffortTechnology '" + t.name() +
                            "': h_prime inconsistent with h near xi=" +
                            std::to_string(xi));
    }
  }
}

}  // namespace

EffortTechnology::EffortTechnology(Fn g, Fn h, Fn h_prime, std::string name)
    : g_(std::move(g)),
      h_(std::move(h)),
      h_prime_(std::move(h_prime)),
      name_(std::move(name)) {
  if (!g_ || !h_ || !h_prime_) {
    throw ValidationError("EffortTechnology '" + name_ +
                          "': g, h and h_prime are all required");
  }
  validate(*this);
}

EffortTechnology EffortTechnology::power(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw ValidationError("power technology: requires alpha in (0, 1]");
  }
  const double inv = 1.0 / alpha;
  return EffortTechnology(
      [alpha](double b) { return std::pow(b, alpha); },
      [inv](double xi) { return std::pow(xi, inv); },
      [inv](double xi) { return inv * std::pow(xi, inv - 1.0); },
      "power[alpha=" + std::to_string(alpha) + "]");
}

}  // namespace tullock
