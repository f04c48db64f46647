#include "eahm/analyzers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eahm/errors.hpp"

namespace eahm {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v))
      throw NumericError(std::string(what) + ": non-finite value in input");
}

// Rescale to peak magnitude 1 when the raw peak leaves [1e-6, 1e6], so the
// absolute sign slack keeps its meaning across scales.
double normalization_scale(std::span<const double> values) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::fabs(v));
  if (peak > 0.0 && (peak > 1e6 || peak < 1e-6)) return 1.0 / peak;
  return 1.0;
}

struct SignPattern {
  Direction direction = Direction::Constant;
  std::optional<std::size_t> positive_index;  // first q > eps
  std::optional<std::size_t> negative_index;  // first q < -eps
  double margin = 0.0;
};

// Classify the sign pattern of quantities q: only positives => Increasing,
// only negatives => Decreasing, none decisive => Constant, both => Mixed.
SignPattern classify_signs(std::span<const double> q, double eps) {
  SignPattern out;
  double min_decisive = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double v = q[k];
    max_abs = std::max(max_abs, std::fabs(v));
    if (v > eps) {
      if (!out.positive_index) out.positive_index = k;
      min_decisive = std::min(min_decisive, std::fabs(v));
    } else if (v < -eps) {
      if (!out.negative_index) out.negative_index = k;
      min_decisive = std::min(min_decisive, std::fabs(v));
    }
  }
  if (out.positive_index && out.negative_index) out.direction = Direction::Mixed;
  else if (out.positive_index) out.direction = Direction::Increasing;
  else if (out.negative_index) out.direction = Direction::Decreasing;
  else out.direction = Direction::Constant;
  out.margin = (out.positive_index || out.negative_index) ? min_decisive
                                                          : eps - max_abs;
  return out;
}

MonotonicityVerdict pattern_to_verdict(const SignPattern& p,
                                       std::size_t witness_stride) {
  MonotonicityVerdict v;
  v.direction = p.direction;
  v.margin = p.margin;
  if (p.positive_index)
    v.rise_witness = IndexPair{*p.positive_index, *p.positive_index + witness_stride};
  if (p.negative_index)
    v.fall_witness = IndexPair{*p.negative_index, *p.negative_index + witness_stride};
  return v;
}

}  // namespace

const char* to_string(Direction d) {
  switch (d) {
    case Direction::Increasing: return "increasing";
    case Direction::Decreasing: return "decreasing";
    case Direction::Constant: return "constant";
    case Direction::Mixed: return "mixed";
  }
  return "?";
}

const char* to_string(OrderRelation r) {
  switch (r) {
    case OrderRelation::Holds: return "holds";
    case OrderRelation::Equal: return "equal";
    case OrderRelation::Reversed: return "reversed";
    case OrderRelation::Crossing: return "crossing";
  }
  return "?";
}

const char* to_string(Tp2Class c) {
  switch (c) {
    case Tp2Class::Tp2: return "tp2";
    case Tp2Class::Rr2: return "rr2";
    case Tp2Class::Both: return "both";
    case Tp2Class::Neither: return "neither";
  }
  return "?";
}

MonotonicityVerdict check_monotone_1d(std::span<const double> values,
                                      const ToleranceProfile& tol) {
  if (values.size() < 2)
    throw ConfigError("monotonicity check needs at least two values");
  require_finite(values, "monotonicity check");
  const double scale = normalization_scale(values);
  std::vector<double> diffs(values.size() - 1);
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    diffs[i] = (values[i + 1] - values[i]) * scale;
  return pattern_to_verdict(classify_signs(diffs, tol.sign_slack), 1);
}

MonotonicityVerdict check_ifr_dfr(std::span<const double> hazard_values,
                                  const ToleranceProfile& tol) {
  for (double h : hazard_values)
    if (std::isnan(h) || h < 0.0)
      throw DomainError("hazard values must be >= 0");
  return check_monotone_1d(hazard_values, tol);
}

MonotonicityVerdict check_ilr_dlr(std::span<const double> density_values,
                                  const Grid& grid,
                                  const ToleranceProfile& tol) {
  if (density_values.size() != grid.size())
    throw ConfigError("density values and grid must have equal length");
  if (grid.size() < 3)
    throw ConfigError("curvature check needs at least three grid points");
  require_finite(density_values, "curvature check");
  std::vector<double> logf(density_values.size());
  for (std::size_t i = 0; i < density_values.size(); ++i) {
    if (!(density_values[i] > 0.0))
      throw DomainError("curvature check needs strictly positive densities");
    logf[i] = std::log(density_values[i]);
  }
  // Second divided differences handle non-uniform grids correctly.
  std::vector<double> curv(grid.size() - 2);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double sl = (logf[i] - logf[i - 1]) / (grid[i] - grid[i - 1]);
    const double sr = (logf[i + 1] - logf[i]) / (grid[i + 1] - grid[i]);
    curv[i - 1] = sr - sl;
  }
  return pattern_to_verdict(classify_signs(curv, tol.sign_slack), 2);
}

OrderVerdict check_st_order(std::span<const double> survival_x,
                            std::span<const double> survival_y,
                            const ToleranceProfile& tol) {
  if (survival_x.size() != survival_y.size() || survival_x.size() < 1)
    throw ConfigError("stochastic order check needs two equal-length curves");
  require_finite(survival_x, "stochastic order check");
  require_finite(survival_y, "stochastic order check");
  const double eps = tol.sign_slack;
  for (auto curve : {survival_x, survival_y}) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve[i] < -eps || curve[i] > 1.0 + eps)
        throw DomainError("survival values must lie in [0, 1]");
      if (i + 1 < curve.size() && curve[i + 1] - curve[i] > eps)
        throw DomainError("survival curves must be nonincreasing");
    }
  }
  // Positive evidence = survival of Y strictly above that of X.
  std::vector<double> gap(survival_x.size());
  for (std::size_t i = 0; i < gap.size(); ++i) gap[i] = survival_y[i] - survival_x[i];
  const SignPattern p = classify_signs(gap, eps);
  OrderVerdict v;
  v.margin = p.margin;
  v.against_holds = p.negative_index;
  v.against_reversed = p.positive_index;
  switch (p.direction) {
    case Direction::Increasing: v.relation = OrderRelation::Holds; break;
    case Direction::Decreasing: v.relation = OrderRelation::Reversed; break;
    case Direction::Constant: v.relation = OrderRelation::Equal; break;
    case Direction::Mixed: v.relation = OrderRelation::Crossing; break;
  }
  return v;
}

OrderVerdict check_lr_order(std::span<const double> density_x,
                            std::span<const double> density_y,
                            const ToleranceProfile& tol) {
  if (density_x.size() != density_y.size() || density_x.size() < 2)
    throw ConfigError("likelihood-ratio check needs two equal-length curves");
  require_finite(density_x, "likelihood-ratio check");
  require_finite(density_y, "likelihood-ratio check");
  std::vector<double> ratio(density_x.size());
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    if (!(density_x[i] > 0.0))
      throw DomainError("likelihood-ratio check needs positive reference density");
    if (density_y[i] < 0.0)
      throw DomainError("density values must be >= 0");
    ratio[i] = density_y[i] / density_x[i];
  }
  const MonotonicityVerdict mono = check_monotone_1d(ratio, tol);
  OrderVerdict v;
  v.margin = mono.margin;
  if (mono.fall_witness) v.against_holds = mono.fall_witness->i;
  if (mono.rise_witness) v.against_reversed = mono.rise_witness->i;
  switch (mono.direction) {
    case Direction::Increasing: v.relation = OrderRelation::Holds; break;
    case Direction::Decreasing: v.relation = OrderRelation::Reversed; break;
    case Direction::Constant: v.relation = OrderRelation::Equal; break;
    case Direction::Mixed: v.relation = OrderRelation::Crossing; break;
  }
  return v;
}

Tp2Verdict check_tp2_rr2(const std::function<double(double, double)>& fn,
                         const Grid& x_grid, const Grid& z_grid,
                         const ToleranceProfile& tol) {
  const std::size_t nx = x_grid.size(), nz = z_grid.size();
  Tp2Verdict v;
  if (nx < 2 || nz < 2) {
    // Vacuous: no adjacent 2x2 window exists.
    v.classification = Tp2Class::Both;
    v.margin = tol.sign_slack;
    return v;
  }
  std::vector<double> val(nx * nz), lg(nx * nz);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nz; ++j) {
      const double b = fn(x_grid[i], z_grid[j]);
      if (!std::isfinite(b) || !(b > 0.0))
        throw DomainError("total-positivity check needs strictly positive values");
      val[i * nz + j] = b;
      lg[i * nz + j] = std::log(b);
    }

  const double eps = tol.sign_slack;
  double min_decisive = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j + 1 < nz; ++j) {
      const double d = lg[i * nz + j] + lg[(i + 1) * nz + j + 1] -
                       lg[i * nz + j + 1] - lg[(i + 1) * nz + j];
      max_abs = std::max(max_abs, std::fabs(d));
      if (d > eps || d < -eps) {
        min_decisive = std::min(min_decisive, std::fabs(d));
        const double raw = val[i * nz + j] * val[(i + 1) * nz + j + 1] -
                           val[i * nz + j + 1] * val[(i + 1) * nz + j];
        Tp2Witness w{i, i + 1, j, j + 1, d, raw};
        if (d > eps && !v.positive) v.positive = w;
        if (d < -eps && !v.negative) v.negative = w;
      }
    }
  }
  if (v.positive && v.negative) v.classification = Tp2Class::Neither;
  else if (v.positive) v.classification = Tp2Class::Tp2;
  else if (v.negative) v.classification = Tp2Class::Rr2;
  else v.classification = Tp2Class::Both;
  v.margin = (v.positive || v.negative) ? min_decisive : eps - max_abs;
  return v;
}

CombinedVerdict combine_slice_verdicts(std::span<const MonotonicityVerdict> slices) {
  CombinedVerdict out;
  if (slices.empty()) {
    out.verdict.direction = Direction::Constant;
    return out;
  }
  bool any_mixed = false, any_inc = false, any_dec = false;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < slices.size(); ++s) {
    const auto& sv = slices[s];
    any_mixed = any_mixed || sv.direction == Direction::Mixed;
    any_inc = any_inc || sv.direction == Direction::Increasing ||
              sv.direction == Direction::Mixed;
    any_dec = any_dec || sv.direction == Direction::Decreasing ||
              sv.direction == Direction::Mixed;
    margin = std::min(margin, sv.margin);
    if (sv.rise_witness && !out.positive_slice) {
      out.positive_slice = s;
      out.verdict.rise_witness = sv.rise_witness;
    }
    if (sv.fall_witness && !out.negative_slice) {
      out.negative_slice = s;
      out.verdict.fall_witness = sv.fall_witness;
    }
  }
  if (any_mixed || (any_inc && any_dec)) out.verdict.direction = Direction::Mixed;
  else if (any_inc) out.verdict.direction = Direction::Increasing;
  else if (any_dec) out.verdict.direction = Direction::Decreasing;
  else out.verdict.direction = Direction::Constant;
  out.verdict.margin = margin;
  return out;
}

SliceVerdicts check_log_convex_slices(const std::function<double(double, double)>& fn,
                                      const Grid& x_grid,
                                      std::span<const double> z_values,
                                      const ToleranceProfile& tol) {
  SliceVerdicts out;
  out.per_slice.reserve(z_values.size());
  std::vector<double> slice(x_grid.size());
  for (double z : z_values) {
    for (std::size_t i = 0; i < x_grid.size(); ++i) slice[i] = fn(x_grid[i], z);
    out.per_slice.push_back(check_ilr_dlr(slice, x_grid, tol));
  }
  CombinedVerdict c = combine_slice_verdicts(out.per_slice);
  out.aggregate = c.verdict;
  out.positive_slice = c.positive_slice;
  out.negative_slice = c.negative_slice;
  return out;
}

EffectMonotonicity check_effect_monotonicity(const CovariateEffect& effect,
                                             const Grid& x_grid,
                                             const Grid& z_grid,
                                             const ToleranceProfile& tol) {
  EffectMonotonicity out;
  auto vacuous = [&tol]() {
    MonotonicityVerdict v;
    v.direction = Direction::Constant;
    v.margin = tol.sign_slack;
    return v;
  };

  if (x_grid.size() < 2) {
    out.in_x = vacuous();
  } else {
    std::vector<MonotonicityVerdict> slices;
    std::vector<double> vals(x_grid.size());
    for (std::size_t j = 0; j < z_grid.size(); ++j) {
      for (std::size_t i = 0; i < x_grid.size(); ++i)
        vals[i] = effect.value(x_grid[i], z_grid[j]);
      slices.push_back(check_monotone_1d(vals, tol));
    }
    CombinedVerdict c = combine_slice_verdicts(slices);
    out.in_x = c.verdict;
    out.in_x_positive_slice = c.positive_slice;
    out.in_x_negative_slice = c.negative_slice;
  }

  if (z_grid.size() < 2) {
    out.in_z = vacuous();
  } else {
    std::vector<MonotonicityVerdict> slices;
    std::vector<double> vals(z_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      for (std::size_t j = 0; j < z_grid.size(); ++j)
        vals[j] = effect.value(x_grid[i], z_grid[j]);
      slices.push_back(check_monotone_1d(vals, tol));
    }
    CombinedVerdict c = combine_slice_verdicts(slices);
    out.in_z = c.verdict;
    out.in_z_positive_slice = c.positive_slice;
    out.in_z_negative_slice = c.negative_slice;
  }
  return out;
}

}  // namespace eahm
