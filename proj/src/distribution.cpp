#include "tullock/distribution.hpp"

#include <cmath>
#include <utility>

namespace tullock {

namespace {

constexpr int kProbePoints = 512;

void validate(const CostDistribution& d) {
  const double lo = d.c_lo(), hi = d.c_hi();
  if (!(lo > 0.0) || !(lo < hi)) {
    throw ValidationError("CostDistribution '" + d.name() +
                          "': requires 0 < c_lo < c_hi");
  }
  if (std::abs(d.cdf(lo)) > 1e-9 || std::abs(d.cdf(hi) - 1.0) > 1e-9) {
    throw ValidationError("CostDistribution '" + d.name() +
                          "': cdf must be 0 at c_lo and 1 at c_hi");
  }
  const double span = hi - lo;
  const double fd_half = 1e-6 * span;
  double prev = d.cdf(lo);
  for (int k = 0; k <= kProbePoints; ++k) {
    const double c = lo + span * k / kProbePoints;
    const double F = d.cdf(c);
    if (F < prev - 1e-12) {
      throw ValidationError("CostDistribution '" + d.name() +
                            "': cdf decreases near c=" + std::to_string(c));
    }
    prev = F;
    const double f = d.pdf(c);
    if (!(f > 0.0)) {
      throw ValidationError("CostDistribution '" + d.name() +
                            "': pdf must be positive on the support");
    }
    // pdf consistency with a centered difference of the cdf (interior only).
    if (k > 0 && k < kProbePoints) {
      const double fd = (d.cdf(c + fd_half) - d.cdf(c - fd_half)) / (2.0 * fd_half);
      if (std::abs(fd - f) > 1e-6 * std::max(1.0, std::abs(f))) {
        throw ValidationError("CostDistribution '" + d.name() +
                              "': pdf inconsistent with cdf near c=" +
                              std::to_string(c));
      }
    }
  }
  for (int k = 0; k <= 64; ++k) {
    const double u = static_cast<double>(k) / 64.0;
    const double c = d.inv_cdf(u);
    if (!d.contains(c) || std::abs(d.cdf(c) - u) > 1e-8) {
      throw ValidationError("CostDistribution '" + d.name() +
                            "': inv_cdf inconsistent with cdf at u=" +
                            std::to_string(u));
    }
  }
}

}  // namespace

CostDistribution::CostDistribution(double c_lo, double c_hi, Fn cdf, Fn pdf,
                                   Fn inv_cdf, std::string name)
    : c_lo_(c_lo),
      c_hi_(c_hi),
      cdf_(std::move(cdf)),
      pdf_(std::move(pdf)),
      inv_cdf_(std::move(inv_cdf)),
      name_(std::move(name)) {
  if (!cdf_ || !pdf_ || !inv_cdf_) {
    throw ValidationError("CostDistribution '" + name_ +
                          "': cdf, pdf and inv_cdf are all required");
  }
  validate(*this);
}

CostDistribution CostDistribution::uniform(double a, double b) {
  if (!(a > 0.0) || !(a < b)) {
    throw ValidationError("uniform distribution: requires 0 < a < b");
  }
  const double w = b - a;
  return CostDistribution(
      a, b,
      [a, b, w](double c) {
        if (c <= a) return 0.0;
        if (c >= b) return 1.0;
        return (c - a) / w;
      },
      [w](double) { return 1.0 / w; },
      [a, w](double u) { return a + u * w; },
      "uniform[" + std::to_string(a) + "," + std::to_string(b) + "]");
}

double virtual_cost(const CostDistribution& dist, double c) {
  if (!dist.contains(c)) {
    throw DomainError("virtual_cost: c=" + std::to_string(c) +
                      " outside support [" + std::to_string(dist.c_lo()) + ", " +
                      std::to_string(dist.c_hi()) + "]");
  }
  return c + dist.cdf(c) / dist.pdf(c);
}

}  // namespace tullock
