#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eahm/effect.hpp"
#include "eahm/grid.hpp"

namespace eahm {

// Slack for sign decisions on grid quantities: |q| <= sign_slack is treated
// as zero.  When the peak magnitude of the examined values leaves
// [1e-6, 1e6] they are rescaled to peak 1 first, so the slack stays
// meaningful; margins are reported in the rescaled units.
struct ToleranceProfile {
  double sign_slack = 1e-9;
};

// Shared verdict vocabulary.  For monotonicity checks the names mean what
// they say; curvature checks reuse them with Increasing = convex evidence
// and Decreasing = concave evidence (see check_ilr_dlr).
enum class Direction { Increasing, Decreasing, Constant, Mixed };

const char* to_string(Direction d);

struct IndexPair {
  std::size_t i = 0;
  std::size_t j = 0;
};

struct MonotonicityVerdict {
  Direction direction = Direction::Constant;
  // First decisive increase / decrease, as grid index pairs.  For curvature
  // checks the pair brackets the three-point stencil (k, k+2).
  std::optional<IndexPair> rise_witness;
  std::optional<IndexPair> fall_witness;
  // Smallest |quantity| among the decisive ones; if nothing was decisive
  // (Constant), the slack left before anything would become decisive.
  double margin = 0.0;
};

inline bool weakly_increasing(const MonotonicityVerdict& v) {
  return v.direction == Direction::Increasing || v.direction == Direction::Constant;
}
inline bool weakly_decreasing(const MonotonicityVerdict& v) {
  return v.direction == Direction::Decreasing || v.direction == Direction::Constant;
}

// Sign pattern of consecutive differences of `values` (>= 2 entries, finite).
MonotonicityVerdict check_monotone_1d(std::span<const double> values,
                                      const ToleranceProfile& tol = {});

// Hazard-shape classification; Increasing = IFR, Decreasing = DFR,
// Constant = both (exponential-like), Mixed = neither.
MonotonicityVerdict check_ifr_dfr(std::span<const double> hazard_values,
                                  const ToleranceProfile& tol = {});

// Likelihood-ratio aging class through the sign of second divided
// differences of log density on the (possibly non-uniform) grid:
// Increasing = log-convex (DLR), Decreasing = log-concave (ILR),
// Constant = both, Mixed = neither.  Needs >= 3 points and positive values.
MonotonicityVerdict check_ilr_dlr(std::span<const double> density_values,
                                  const Grid& grid,
                                  const ToleranceProfile& tol = {});

inline bool log_convex(const MonotonicityVerdict& v) { return weakly_increasing(v); }
inline bool log_concave(const MonotonicityVerdict& v) { return weakly_decreasing(v); }

enum class OrderRelation { Holds, Equal, Reversed, Crossing };

const char* to_string(OrderRelation r);

struct OrderVerdict {
  OrderRelation relation = OrderRelation::Equal;
  // First decisive point against "X precedes Y" / against the reverse.
  // For the likelihood-ratio check these are left endpoints of an adjacent
  // pair; for the survival check they are single grid points.
  std::optional<std::size_t> against_holds;
  std::optional<std::size_t> against_reversed;
  double margin = 0.0;
};

// Usual stochastic order on survival curves over a shared grid:
// Holds = X precedes Y (survival of X never above that of Y beyond slack).
// Curves must be nonincreasing within slack, else ConfigError.
OrderVerdict check_st_order(std::span<const double> survival_x,
                            std::span<const double> survival_y,
                            const ToleranceProfile& tol = {});

// Likelihood-ratio order via monotonicity of density_y / density_x.
// density_x must be strictly positive on the grid.
OrderVerdict check_lr_order(std::span<const double> density_x,
                            std::span<const double> density_y,
                            const ToleranceProfile& tol = {});

enum class Tp2Class { Tp2, Rr2, Both, Neither };

const char* to_string(Tp2Class c);

struct Tp2Witness {
  std::size_t x1 = 0, x2 = 0, z1 = 0, z2 = 0;  // grid indices, x2 = x1+1 etc.
  double log_det = 0.0;  // log b11 + log b22 - log b12 - log b21
  double det = 0.0;      // b11*b22 - b12*b21 in raw units
};

struct Tp2Verdict {
  Tp2Class classification = Tp2Class::Both;
  std::optional<Tp2Witness> positive;  // first decisive TP2-evidence (anti-RR2)
  std::optional<Tp2Witness> negative;  // first decisive RR2-evidence (anti-TP2)
  double margin = 0.0;                 // in log-determinant units
};

// Sign pattern of all adjacent 2x2 minors of fn over x_grid x z_grid,
// evaluated in the log domain.  For positive kernels, adjacent-minor
// nonnegativity propagates to all 2x2 minors, so this decides TP2/RR2 on
// the grid.  fn must be strictly positive there.
Tp2Verdict check_tp2_rr2(const std::function<double(double, double)>& fn,
                         const Grid& x_grid, const Grid& z_grid,
                         const ToleranceProfile& tol = {});

struct SliceVerdicts {
  std::vector<MonotonicityVerdict> per_slice;
  MonotonicityVerdict aggregate;
  // Slices supplying the aggregate witnesses, when any.
  std::optional<std::size_t> positive_slice;
  std::optional<std::size_t> negative_slice;
};

// Curvature of log fn(., z) for every z in z_values (each slice must be
// positive on x_grid).  aggregate.direction = Increasing means every slice
// is log-convex within slack.
SliceVerdicts check_log_convex_slices(const std::function<double(double, double)>& fn,
                                      const Grid& x_grid,
                                      std::span<const double> z_values,
                                      const ToleranceProfile& tol = {});

struct EffectMonotonicity {
  MonotonicityVerdict in_x;  // aggregated over z slices
  MonotonicityVerdict in_z;  // aggregated over x slices
  std::optional<std::size_t> in_x_positive_slice, in_x_negative_slice;
  std::optional<std::size_t> in_z_positive_slice, in_z_negative_slice;
};

// Monotonicity of the additive effect in each argument, slice by slice.
// A z-grid with fewer than 2 points yields a vacuous Constant verdict for
// in_z (and likewise for x).
EffectMonotonicity check_effect_monotonicity(const CovariateEffect& effect,
                                             const Grid& x_grid,
                                             const Grid& z_grid,
                                             const ToleranceProfile& tol = {});

// Combine per-slice verdicts: any Mixed, or both Increasing and Decreasing
// slices, give Mixed; a single consistent trend wins over Constant slices.
struct CombinedVerdict {
  MonotonicityVerdict verdict;
  std::optional<std::size_t> positive_slice;
  std::optional<std::size_t> negative_slice;
};
CombinedVerdict combine_slice_verdicts(std::span<const MonotonicityVerdict> slices);

}  // namespace eahm
