#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "eahm/grid.hpp"

namespace eahm {

// Tolerances and budgets for the adaptive integrator.  The defaults are the
// ones used throughout the toolkit; scenario files may tighten or relax them.
struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  std::size_t max_subdivisions = 32768;
  // Expectations over unbounded covariate supports are truncated at this
  // quantile of the covariate distribution.
  double tail_quantile = 1.0 - 1e-10;
};

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;          // estimated absolute error
  std::size_t evaluations = 0; // integrand evaluations spent
  bool converged = false;      // error <= max(abs_tol, rel_tol * |value|)
};

// Adaptive Gauss-Kronrod (7-15) integration of f over [lo, hi].
// hi may be +infinity, in which case the tail is folded onto a finite
// interval with x = lo + u/(1-u).  Non-convergence is reported through
// `converged`, never thrown; callers decide whether that is fatal.
// Deterministic: identical inputs produce bit-identical results.
IntegrationResult integrate_1d(const std::function<double(double)>& f,
                               double lo, double hi,
                               const QuadratureSpec& spec = {});

struct CumulativeResult {
  std::vector<double> values;  // values[i] = integral from grid[0] to grid[i]
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Integral of f from grid.front() to every grid point, computed panel by
// panel so the values are consistent (values[i+1] - values[i] is the panel
// integral) and monotone for nonnegative f.
CumulativeResult cumulative_integral_grid(const std::function<double(double)>& f,
                                          const Grid& grid,
                                          const QuadratureSpec& spec = {});

// Root of a continuous function with a sign change on [lo, hi]: bisection
// with secant acceleration.  Stops when |f(x)| <= tol or the bracket width
// is <= tol.  Throws BracketError when f(lo) and f(hi) have the same sign.
double root_find_monotone(const std::function<double(double)>& f,
                          double lo, double hi, double tol = 1e-12);

}  // namespace eahm
