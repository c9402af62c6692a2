#pragma once

#include <functional>
#include <vector>

#include "tullock/errors.hpp"

namespace tullock::numerics {

using ScalarFn = std::function<double(double)>;
using SystemFn = std::function<std::vector<double>(const std::vector<double>&)>;

/// Uniform grid c_lo + j*weight, j = 0..m-1, with weight = (c_hi - c_lo)/m.
/// The last point sits one spacing below c_hi (left-endpoint quadrature).
struct QuadratureGrid {
  std::vector<double> points;
  double weight = 0.0;
  int m = 0;

  static QuadratureGrid uniform(double lo, double hi, int m);
};

struct SolverSettings {
  double residual_tol = 1e-9;  // max-norm residual target
  int max_iter = 200;
  double damping = 1.0;   // initial Newton step scale, in (0, 1]
  double fd_step = 1e-7;  // relative forward-difference step for the Jacobian
};

/// Thrown when adaptive subdivision exhausts its budget. Carries the best
/// estimate so far and the accumulated error bound.
struct IntegrationError : NumericalError {
  IntegrationError(const std::string& what, double best, double bound)
      : NumericalError(what), best_estimate(best), error_bound(bound) {}
  double best_estimate;
  double error_bound;
};

/// Thrown by find_root when f(lo) and f(hi) do not bracket a root.
struct BracketError : NumericalError {
  using NumericalError::NumericalError;
};

/// Thrown by solve_system on non-convergence or loss of positivity.
struct SolveError : NumericalError {
  SolveError(const std::string& what, std::vector<double> x, double r)
      : NumericalError(what), last_iterate(std::move(x)), residual(r) {}
  std::vector<double> last_iterate;
  double residual;
};

struct IntegralEstimate {
  double value = 0.0;
  double error_bound = 0.0;
  long evaluations = 0;
};

/// Adaptive Simpson integration of f over [lo, hi] to absolute error <= tol.
/// Returns the value plus the accumulated error bound of the accepted panels.
IntegralEstimate integrate_1d_result(const ScalarFn& f, double lo, double hi,
                                     double tol);

/// Convenience wrapper returning just the value.
double integrate_1d(const ScalarFn& f, double lo, double hi, double tol);

/// Brent-style bisection/secant hybrid on a sign-changing bracket [lo, hi].
/// Stops when |f(x)| <= tol or the bracket width falls below tol.
/// Deterministic: identical inputs give bit-identical output.
double find_root(const ScalarFn& f, double lo, double hi, double tol);

/// Damped Newton for a square system F(x) = 0 with forward-difference
/// Jacobians. Iterates are kept strictly positive componentwise by
/// backtracking step halving (the contest systems divide by contributions).
std::vector<double> solve_system(const SystemFn& F, const std::vector<double>& x0,
                                 const SolverSettings& settings = {});

double max_abs(const std::vector<double>& v);

}  // namespace tullock::numerics
