#include "tullock/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tullock::numerics {

QuadratureGrid QuadratureGrid::uniform(double lo, double hi, int m) {
  if (!(lo < hi) || m < 2) {
    throw ValidationError("QuadratureGrid: need lo < hi and m >= 2");
  }
  QuadratureGrid g;
  g.m = m;
  g.weight = (hi - lo) / m;
  g.points.resize(m);
  for (int j = 0; j < m; ++j) g.points[j] = lo + j * g.weight;
  return g;
}

double max_abs(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

namespace {

constexpr int kMaxDepth = 48;
constexpr long kMaxEvaluations = 4'000'000;

struct AdaptiveState {
  const ScalarFn& f;
  long evaluations = 0;
  double bound = 0.0;  // accumulated |S2 - S1| / 15 over accepted panels
  bool budget_hit = false;

  double eval(double x) {
    ++evaluations;
    double y = f(x);
    if (!std::isfinite(y)) {
      throw IntegrationError("integrate_1d: integrand not finite at x=" +
                                 std::to_string(x),
                             std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::infinity());
    }
    return y;
  }
};

// Recursive Simpson with Richardson correction. `whole` is the Simpson
// estimate over [a, b] from (fa, fm, fb).
double adapt(AdaptiveState& st, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.eval(lm);
  const double frm = st.eval(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  const bool out_of_budget = depth <= 0 || st.evaluations > kMaxEvaluations;
  if (std::abs(diff) <= 15.0 * tol || out_of_budget) {
    if (out_of_budget && std::abs(diff) > 15.0 * tol) st.budget_hit = true;
    st.bound += std::abs(diff) / 15.0;
    return left + right + diff / 15.0;
  }
  return adapt(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

IntegralEstimate integrate_1d_result(const ScalarFn& f, double lo, double hi,
                                     double tol) {
  if (!(lo <= hi)) throw ValidationError("integrate_1d: requires lo <= hi");
  if (!(tol > 0.0)) throw ValidationError("integrate_1d: requires tol > 0");
  if (lo == hi) return {0.0, 0.0, 0};

  AdaptiveState st{f};
  const double fa = st.eval(lo);
  const double fm = st.eval(0.5 * (lo + hi));
  const double fb = st.eval(hi);
  const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
  const double value = adapt(st, lo, hi, fa, fm, fb, whole, tol, kMaxDepth);
  if (st.budget_hit && st.bound > tol) {
    throw IntegrationError(
        "integrate_1d: subdivision budget exhausted (best estimate " +
            std::to_string(value) + ", bound " + std::to_string(st.bound) + ")",
        value, st.bound);
  }
  return {value, st.bound, st.evaluations};
}

double integrate_1d(const ScalarFn& f, double lo, double hi, double tol) {
  return integrate_1d_result(f, lo, hi, tol).value;
}

double find_root(const ScalarFn& f, double lo, double hi, double tol) {
  if (!(lo <= hi)) throw ValidationError("find_root: requires lo <= hi");
  if (!(tol > 0.0)) throw ValidationError("find_root: requires tol > 0");

  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    throw BracketError("find_root: no sign change on [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
  }

  // Brent: a is kept so that [a, b] (or [b, a]) brackets the root and b is
  // the best iterate.
  double c = a, fc = fa;
  double d = b - a, e = d;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0 || std::abs(fb) <= tol) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // inverse quadratic / secant step
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

namespace {

// Dense LU with partial pivoting; solves J * x = rhs in place.
std::vector<double> lu_solve(std::vector<double> J, std::vector<double> rhs,
                             const std::vector<double>& iterate, double residual) {
  const std::size_t n = rhs.size();
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(J[piv[k] * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(J[piv[i] * n + k]);
      if (cand > best) {
        best = cand;
        p = i;
      }
    }
    if (best < 1e-300) {
      throw SolveError("solve_system: singular Jacobian", iterate, residual);
    }
    std::swap(piv[k], piv[p]);
    const double pivot = J[piv[k] * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = J[piv[i] * n + k] / pivot;
      J[piv[i] * n + k] = factor;
      for (std::size_t j = k + 1; j < n; ++j) {
        J[piv[i] * n + j] -= factor * J[piv[k] * n + j];
      }
      rhs[piv[i]] -= factor * rhs[piv[k]];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ik = n; ik-- > 0;) {
    double s = rhs[piv[ik]];
    for (std::size_t j = ik + 1; j < n; ++j) s -= J[piv[ik] * n + j] * x[j];
    x[ik] = s / J[piv[ik] * n + ik];
  }
  return x;
}

bool all_positive(const std::vector<double>& v) {
  for (double x : v) {
    if (!(x > 0.0)) return false;
  }
  return true;
}

}  // namespace

std::vector<double> solve_system(const SystemFn& F, const std::vector<double>& x0,
                                 const SolverSettings& settings) {
  if (x0.empty()) throw ValidationError("solve_system: empty initial guess");
  if (!all_positive(x0)) {
    throw ValidationError("solve_system: initial guess must be strictly positive");
  }
  if (!(settings.residual_tol > 0.0) || settings.max_iter < 1 ||
      !(settings.damping > 0.0 && settings.damping <= 1.0)) {
    throw ValidationError("solve_system: invalid settings");
  }

  const std::size_t n = x0.size();
  std::vector<double> x = x0;
  std::vector<double> fx = F(x);
  if (fx.size() != n) {
    throw ValidationError("solve_system: F must return a vector of the same size");
  }
  double res = max_abs(fx);

  std::vector<double> J(n * n);
  std::vector<double> xp(n), fp(n), rhs(n);
  for (int iter = 0; iter < settings.max_iter; ++iter) {
    if (res <= settings.residual_tol) return x;

    // Forward-difference Jacobian, column by column.
    for (std::size_t j = 0; j < n; ++j) {
      xp = x;
      const double h = settings.fd_step * std::max(std::abs(x[j]), settings.fd_step);
      xp[j] += h;
      fp = F(xp);
      for (std::size_t i = 0; i < n; ++i) J[i * n + j] = (fp[i] - fx[i]) / h;
    }
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -fx[i];
    const std::vector<double> step = lu_solve(J, rhs, x, res);

    // Backtracking: largest halved step that stays positive and reduces the
    // residual; failing a reduction, the feasible probe with the smallest
    // residual (max_iter bounds any stall).
    double lambda = settings.damping;
    bool accepted = false;
    bool any_feasible = false;
    double best_res = std::numeric_limits<double>::infinity();
    std::vector<double> best_x, best_f;
    for (int k = 0; k <= 40; ++k, lambda *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) xp[i] = x[i] + lambda * step[i];
      if (!all_positive(xp)) continue;
      any_feasible = true;
      fp = F(xp);
      const double r = max_abs(fp);
      if (r < res) {
        x = xp;
        fx = fp;
        res = r;
        accepted = true;
        break;
      }
      if (r < best_res) {
        best_res = r;
        best_x = xp;
        best_f = fp;
      }
    }
    if (!accepted) {
      if (!any_feasible) {
        throw SolveError(
            "solve_system: step leaves the positive orthant after full backtracking",
            x, res);
      }
      x = std::move(best_x);
      fx = std::move(best_f);
      res = best_res;
    }
  }
  if (res <= settings.residual_tol) return x;
  throw SolveError("solve_system: max_iter exceeded (residual " +
                       std::to_string(res) + ")",
                   x, res);
}

}  // namespace tullock::numerics
