#include "eahm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "eahm/errors.hpp"

namespace eahm {
namespace {

// 15-point Kronrod abscissae (positive half, descending) and weights, with
// the embedded 7-point Gauss weights; the Gauss nodes are the odd-indexed
// Kronrod nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEstimate {
  double integral = 0.0;
  double error = 0.0;
};

// One Gauss-Kronrod 7-15 pass over [a, b] with the QUADPACK error estimate.
PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);

  double fv[15];
  fv[7] = f(center);
  for (int j = 0; j < 7; ++j) {
    const double dx = hlgth * kXgk[j];
    fv[j] = f(center - dx);       // left nodes, outermost first
    fv[14 - j] = f(center + dx);  // right nodes
  }

  double resg = kWg[3] * fv[7];
  double resk = kWgk[7] * fv[7];
  double resabs = kWgk[7] * std::fabs(fv[7]);
  for (int j = 0; j < 7; ++j) {
    const double fsum = fv[j] + fv[14 - j];
    resk += kWgk[j] * fsum;
    resabs += kWgk[j] * (std::fabs(fv[j]) + std::fabs(fv[14 - j]));
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }

  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fv[7] - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[14 - j] - reskh));

  PanelEstimate out;
  out.integral = resk * hlgth;
  resabs *= std::fabs(hlgth);
  resasc *= std::fabs(hlgth);
  double err = std::fabs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  const double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
  out.error = err;
  return out;
}

struct Panel {
  double a, b;
  PanelEstimate est;
};

// Locally adaptive driver: a panel is accepted once its error fits its
// proportional share of the global tolerance, otherwise it is bisected.
IntegrationResult integrate_finite(const std::function<double(double)>& f,
                                   double lo, double hi,
                                   const QuadratureSpec& spec) {
  IntegrationResult res;
  if (lo == hi) {
    res.converged = true;
    return res;
  }

  const double total_len = hi - lo;
  PanelEstimate whole = gk15(f, lo, hi);
  res.evaluations = 15;
  // Rough magnitude for the relative part of the tolerance.
  const double tol_global =
      std::max(spec.abs_tol, spec.rel_tol * std::fabs(whole.integral));

  std::vector<Panel> stack;
  stack.push_back({lo, hi, whole});
  double sum = 0.0, err_sum = 0.0;
  std::size_t splits = 0;
  const int kMaxDepthWidth = 4;  // refuse to split panels below ~4 ulp width

  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    const double share = tol_global * ((p.b - p.a) / total_len);
    const double width_floor =
        kMaxDepthWidth * std::numeric_limits<double>::epsilon() *
        std::max(std::fabs(p.a), std::fabs(p.b));
    const bool can_split = splits < spec.max_subdivisions &&
                           (p.b - p.a) > width_floor &&
                           std::isfinite(p.est.integral);
    if (p.est.error <= share || !can_split) {
      sum += p.est.integral;
      err_sum += p.est.error;
      continue;
    }
    const double mid = 0.5 * (p.a + p.b);
    ++splits;
    PanelEstimate left = gk15(f, p.a, mid);
    PanelEstimate right = gk15(f, mid, p.b);
    res.evaluations += 30;
    // Right pushed first so the left half is processed next: panels are
    // accepted in left-to-right order and summation order is deterministic.
    stack.push_back({mid, p.b, right});
    stack.push_back({p.a, mid, left});
  }

  res.value = sum;
  res.error = err_sum;
  res.converged =
      std::isfinite(sum) &&
      err_sum <= std::max(spec.abs_tol, spec.rel_tol * std::fabs(sum));
  return res;
}

}  // namespace

IntegrationResult integrate_1d(const std::function<double(double)>& f,
                               double lo, double hi,
                               const QuadratureSpec& spec) {
  if (std::isnan(lo) || std::isnan(hi))
    throw DomainError("integration bounds must not be NaN");
  if (std::isinf(lo)) throw DomainError("lower integration bound must be finite");
  if (!(hi >= lo)) throw DomainError("integration needs hi >= lo");

  if (std::isinf(hi)) {
    // x = lo + u/(1-u) maps [0,1) onto [lo, inf); dx = du/(1-u)^2.
    auto g = [&f, lo](double u) {
      const double om = 1.0 - u;
      const double x = lo + u / om;
      const double fx = f(x);
      return fx == 0.0 ? 0.0 : fx / (om * om);
    };
    return integrate_finite(g, 0.0, 1.0, spec);
  }
  return integrate_finite(f, lo, hi, spec);
}

CumulativeResult cumulative_integral_grid(const std::function<double(double)>& f,
                                          const Grid& grid,
                                          const QuadratureSpec& spec) {
  CumulativeResult out;
  const std::size_t n = grid.size();
  out.values.assign(n, 0.0);
  out.converged = true;
  if (n < 2) return out;

  QuadratureSpec panel_spec = spec;
  panel_spec.abs_tol = spec.abs_tol / static_cast<double>(n - 1);

  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    IntegrationResult r = integrate_1d(f, grid[i], grid[i + 1], panel_spec);
    acc += r.value;
    out.values[i + 1] = acc;
    out.error += r.error;
    out.evaluations += r.evaluations;
    out.converged = out.converged && r.converged;
  }
  return out;
}

double root_find_monotone(const std::function<double(double)>& f,
                          double lo, double hi, double tol) {
  if (!(hi > lo)) throw DomainError("root_find_monotone needs hi > lo");
  if (!(tol > 0.0)) throw DomainError("root_find_monotone needs tol > 0");

  double a = lo, b = hi;
  double fa = f(a), fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw BracketError("root_find_monotone: endpoint value not finite");
  if (std::fabs(fa) <= tol) return a;
  if (std::fabs(fb) <= tol) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw BracketError("root_find_monotone: no sign change on [lo, hi]");

  // Bisection with a secant proposal; fall back to the midpoint whenever the
  // secant step leaves the bracket or stalls.
  double prev_width = b - a;
  for (int it = 0; it < 200; ++it) {
    if (b - a <= tol) break;
    double x = b - fb * (b - a) / (fb - fa);
    const double safety = 0.01 * (b - a);
    if (!std::isfinite(x) || x <= a + safety || x >= b - safety ||
        (it % 2 == 1 && (b - a) > 0.5 * prev_width)) {
      x = 0.5 * (a + b);
    }
    if (it % 2 == 1) prev_width = b - a;
    const double fx = f(x);
    if (!std::isfinite(fx))
      throw BracketError("root_find_monotone: function value not finite");
    if (std::fabs(fx) <= tol) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace eahm
