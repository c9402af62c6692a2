#pragma once

#include <functional>
#include <string>

#include "tullock/errors.hpp"

namespace tullock {

/// Effort technology: g maps effort to contribution, h = g^-1 maps a
/// contribution back to the effort needed to produce it, h_prime is dh/dxi.
/// Validators run at construction (g(0)=0, monotone concave g, h inverts g,
/// h_prime consistent with finite differences of h).
class EffortTechnology {
 public:
  using Fn = std::function<double(double)>;

  EffortTechnology(Fn g, Fn h, Fn h_prime, std::string name);

  /// Power law g(b) = b^alpha with alpha in (0, 1]; h(xi) = xi^(1/alpha).
  static EffortTechnology power(double alpha);

  double g(double effort) const { return g_(effort); }
  double h(double xi) const { return h_(xi); }
  double h_prime(double xi) const { return h_prime_(xi); }
  const std::string& name() const { return name_; }

 private:
  Fn g_, h_, h_prime_;
  std::string name_;
};

}  // namespace tullock
