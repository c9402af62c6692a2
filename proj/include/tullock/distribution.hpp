#pragma once

#include <functional>
#include <string>

#include "tullock/errors.hpp"

namespace tullock {

/// Common prior over player marginal costs on [c_lo, c_hi]. Immutable after
/// construction; the constructor runs the invariant validators (512-point
/// probe grid), so an instance that exists is well-formed.
class CostDistribution {
 public:
  using Fn = std::function<double(double)>;

  CostDistribution(double c_lo, double c_hi, Fn cdf, Fn pdf, Fn inv_cdf,
                   std::string name);

  static CostDistribution uniform(double a, double b);

  double c_lo() const { return c_lo_; }
  double c_hi() const { return c_hi_; }
  double cdf(double c) const { return cdf_(c); }
  double pdf(double c) const { return pdf_(c); }
  /// Exact inverse CDF; required by the simulator's type sampling.
  double inv_cdf(double u) const { return inv_cdf_(u); }
  const std::string& name() const { return name_; }

  bool contains(double c) const { return c >= c_lo_ && c <= c_hi_; }

 private:
  double c_lo_, c_hi_;
  Fn cdf_, pdf_, inv_cdf_;
  std::string name_;
};

/// Virtual cost phi(c) = c + F(c)/f(c). Errors outside the support.
double virtual_cost(const CostDistribution& dist, double c);

}  // namespace tullock
