#include "eahm/theorem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eahm/errors.hpp"

namespace eahm {
namespace {

std::string describe_pair(const std::optional<IndexPair>& p, const Grid& g,
                          const char* label) {
  if (!p) return {};
  std::ostringstream os;
  os << " " << label << " at grid[" << p->i << ".." << p->j << "] = ["
     << g[p->i] << ", " << g[p->j] << "]";
  return os.str();
}

// Midpoint refinement: keeps every original point, doubles the density.
Grid refine(const Grid& g) {
  const auto& p = g.points();
  if (p.size() < 2) return g;
  std::vector<double> out;
  out.reserve(2 * p.size() - 1);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    out.push_back(p[i]);
    out.push_back(0.5 * (p[i] + p[i + 1]));
  }
  out.push_back(p.back());
  return Grid(std::move(out));
}

struct VerifyPass {
  PreservationReport report;
  bool anomaly_candidate = false;
};

VerifyPass run_verify_pass(const EahmModel& m, const Grid& xg, const Grid& zg,
                           const ToleranceProfile& tol,
                           const QuadratureSpec& spec) {
  VerifyPass pass;
  PreservationReport& r = pass.report;
  r.x_grid_points = xg.points();
  r.z_grid_points = zg.points();

  // [0] baseline hazard nonincreasing.
  std::vector<double> hvals(xg.size());
  for (std::size_t i = 0; i < xg.size(); ++i) hvals[i] = m.baseline().hazard(xg[i]);
  r.baseline_hazard = check_ifr_dfr(hvals, tol);
  {
    HypothesisEntry& e = r.hypotheses[0];
    e.name = "baseline-hazard-nonincreasing";
    e.holds = weakly_decreasing(r.baseline_hazard);
    e.margin = r.baseline_hazard.margin;
    std::ostringstream os;
    os << "baseline hazard is " << to_string(r.baseline_hazard.direction)
       << describe_pair(r.baseline_hazard.rise_witness, xg, "rise");
    e.summary = os.str();
  }

  // [1]/[2] effect monotone: nonincreasing in x, monotone in z.
  r.effect_monotonicity = check_effect_monotonicity(m.effect(), xg, zg, tol);
  {
    HypothesisEntry& e = r.hypotheses[1];
    e.name = "effect-nonincreasing-in-x";
    e.holds = weakly_decreasing(r.effect_monotonicity.in_x);
    e.margin = r.effect_monotonicity.in_x.margin;
    std::ostringstream os;
    os << "effect is " << to_string(r.effect_monotonicity.in_x.direction)
       << " in x" << describe_pair(r.effect_monotonicity.in_x.rise_witness, xg, "rise");
    e.summary = os.str();
  }
  r.effect_z_direction = r.effect_monotonicity.in_z.direction;
  {
    HypothesisEntry& e = r.hypotheses[2];
    e.name = "effect-monotone-in-z";
    e.holds = r.effect_z_direction != Direction::Mixed;
    e.margin = r.effect_monotonicity.in_z.margin;
    std::ostringstream os;
    os << "effect is " << to_string(r.effect_z_direction) << " in z";
    e.summary = os.str();
  }

  // [3] conditional hazard sign-regular, pairing depends on the z direction:
  // an effect increasing in z demands reverse-regularity, a decreasing one
  // demands total positivity; a z-constant effect accepts either.
  switch (r.effect_z_direction) {
    case Direction::Increasing: r.sign_regularity_required = Tp2Class::Rr2; break;
    case Direction::Decreasing: r.sign_regularity_required = Tp2Class::Tp2; break;
    default: r.sign_regularity_required = Tp2Class::Both; break;
  }
  auto cond_hazard = [&m](double x, double z) {
    return m.baseline().hazard(x) + m.effect().value(x, z);
  };
  r.conditional_hazard_sign = check_tp2_rr2(cond_hazard, xg, zg, tol);
  {
    HypothesisEntry& e = r.hypotheses[3];
    e.name = "conditional-hazard-sign-regular";
    const Tp2Class got = r.conditional_hazard_sign.classification;
    switch (r.sign_regularity_required) {
      case Tp2Class::Rr2:
        e.holds = got == Tp2Class::Rr2 || got == Tp2Class::Both;
        break;
      case Tp2Class::Tp2:
        e.holds = got == Tp2Class::Tp2 || got == Tp2Class::Both;
        break;
      default:
        e.holds = got != Tp2Class::Neither;
        break;
    }
    e.margin = r.conditional_hazard_sign.margin;
    std::ostringstream os;
    os << "conditional hazard is " << to_string(got) << " (required: "
       << to_string(r.sign_regularity_required) << ")";
    if (!e.holds && r.conditional_hazard_sign.positive) {
      const auto& w = *r.conditional_hazard_sign.positive;
      os << "; positive minor at x[" << w.x1 << "," << w.x2 << "] z[" << w.z1
         << "," << w.z2 << "] det " << w.det;
    }
    if (!e.holds && r.conditional_hazard_sign.negative) {
      const auto& w = *r.conditional_hazard_sign.negative;
      os << "; negative minor at x[" << w.x1 << "," << w.x2 << "] z[" << w.z1
         << "," << w.z2 << "] det " << w.det;
    }
    e.summary = os.str();
  }

  // [4] conditional hazard log-convex in x per covariate value.
  r.conditional_log_convexity =
      check_log_convex_slices(cond_hazard, xg, zg.span(), tol);
  {
    HypothesisEntry& e = r.hypotheses[4];
    e.name = "conditional-hazard-log-convex";
    e.holds = log_convex(r.conditional_log_convexity.aggregate);
    e.margin = r.conditional_log_convexity.aggregate.margin;
    std::ostringstream os;
    os << "conditional hazard slices are "
       << to_string(r.conditional_log_convexity.aggregate.direction)
       << " in log-curvature";
    if (!e.holds && r.conditional_log_convexity.negative_slice)
      os << "; concave evidence in slice z index "
         << *r.conditional_log_convexity.negative_slice;
    e.summary = os.str();
  }

  // Conclusion: overall density log-convex.
  std::vector<double> fstar(xg.size());
  for (std::size_t i = 0; i < xg.size(); ++i)
    fstar[i] = overall_density(m, xg[i], spec);
  r.overall_density_curve = fstar;
  r.conclusion_curvature = check_ilr_dlr(fstar, xg, tol);
  {
    HypothesisEntry& e = r.conclusion;
    e.name = "overall-density-log-convex";
    e.holds = log_convex(r.conclusion_curvature);
    e.margin = r.conclusion_curvature.margin;
    std::ostringstream os;
    os << "overall density log-curvature is "
       << to_string(r.conclusion_curvature.direction)
       << describe_pair(r.conclusion_curvature.fall_witness, xg, "concave stencil");
    e.summary = os.str();
  }

  for (int i = 0; i < 5; ++i)
    if (!r.hypotheses[i].holds) r.failed_hypotheses.push_back(i + 1);

  const double decisive = 10.0 * tol.sign_slack;
  if (!r.failed_hypotheses.empty()) {
    r.status = PreservationStatus::HypothesisFails;
  } else if (r.conclusion.holds) {
    r.status = PreservationStatus::ConclusionHolds;
  } else {
    bool all_decisive = r.conclusion.margin > decisive;
    for (const auto& h : r.hypotheses)
      all_decisive = all_decisive && h.margin > decisive;
    if (all_decisive) {
      r.status = PreservationStatus::Anomaly;
      pass.anomaly_candidate = true;
    } else {
      r.status = PreservationStatus::Inconclusive;
    }
  }
  return pass;
}

}  // namespace

const char* to_string(PreservationStatus s) {
  switch (s) {
    case PreservationStatus::ConclusionHolds:
      return "hypotheses-hold-conclusion-holds";
    case PreservationStatus::HypothesisFails: return "hypothesis-fails";
    case PreservationStatus::Anomaly: return "anomaly";
    case PreservationStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

PreservationReport verify_dfr_to_dlr(const EahmModel& m, const Grid& x_grid,
                                     const Grid& z_grid,
                                     const ToleranceProfile& tol,
                                     const QuadratureSpec& spec) {
  VerifyPass first = run_verify_pass(m, x_grid, z_grid, tol, spec);
  if (!first.anomaly_candidate) return first.report;

  // Decisive contradiction of the preservation statement: distrust the grid
  // once and re-verify at doubled density before reporting an anomaly.
  const Grid xr = refine(x_grid);
  const Grid zr = m.covariate().is_discrete() ? z_grid : refine(z_grid);
  VerifyPass second = run_verify_pass(m, xr, zr, tol, spec);
  second.report.regridded = true;
  return second.report;
}

ExpectationMonotonicityReport verify_expectation_monotonicity(
    const std::function<CovariateDistribution(double)>& family,
    const std::function<double(double, double)>& phi, const Grid& theta_grid,
    const Grid& v_grid, const ToleranceProfile& tol, const QuadratureSpec& spec) {
  ExpectationMonotonicityReport rep;
  const std::size_t nt = theta_grid.size();

  // E(theta) under the theta-indexed law.
  rep.expectation_values.resize(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double theta = theta_grid[i];
    CovariateDistribution g = family(theta);
    IntegrationResult e = expect_over_covariate(
        g, [&phi, theta](double v) { return phi(theta, v); }, spec);
    if (!e.converged)
      throw QuadratureError("expectation over the covariate family did not converge");
    rep.expectation_values[i] = e.value;
  }
  rep.expectation = check_monotone_1d(rep.expectation_values, tol);

  // Stochastic-order trend of the family along theta.
  {
    std::vector<double> sa(v_grid.size()), sb(v_grid.size());
    std::vector<MonotonicityVerdict> steps;
    for (std::size_t i = 0; i + 1 < nt; ++i) {
      CovariateDistribution ga = family(theta_grid[i]);
      CovariateDistribution gb = family(theta_grid[i + 1]);
      for (std::size_t j = 0; j < v_grid.size(); ++j) {
        sa[j] = 1.0 - ga.cdf(v_grid[j]);
        sb[j] = 1.0 - gb.cdf(v_grid[j]);
      }
      // Encode each pairwise comparison as a pseudo-monotonicity verdict so
      // the usual combiner can aggregate directions.
      OrderVerdict ov = check_st_order(sa, sb, tol);
      MonotonicityVerdict mv;
      mv.margin = ov.margin;
      switch (ov.relation) {
        case OrderRelation::Holds: mv.direction = Direction::Increasing; break;
        case OrderRelation::Reversed: mv.direction = Direction::Decreasing; break;
        case OrderRelation::Equal: mv.direction = Direction::Constant; break;
        case OrderRelation::Crossing: mv.direction = Direction::Mixed; break;
      }
      steps.push_back(mv);
    }
    rep.family_st_direction = steps.empty()
                                  ? Direction::Constant
                                  : combine_slice_verdicts(steps).verdict.direction;
  }

  // phi monotone in v (per theta slice) and in theta (per v slice).
  {
    std::vector<MonotonicityVerdict> slices;
    std::vector<double> vals(v_grid.size());
    for (std::size_t i = 0; i < nt; ++i) {
      for (std::size_t j = 0; j < v_grid.size(); ++j)
        vals[j] = phi(theta_grid[i], v_grid[j]);
      slices.push_back(check_monotone_1d(vals, tol));
    }
    rep.phi_in_v = combine_slice_verdicts(slices).verdict;
  }
  {
    std::vector<MonotonicityVerdict> slices;
    std::vector<double> vals(nt);
    for (std::size_t j = 0; j < v_grid.size(); ++j) {
      for (std::size_t i = 0; i < nt; ++i) vals[i] = phi(theta_grid[i], v_grid[j]);
      slices.push_back(check_monotone_1d(vals, tol));
    }
    rep.phi_in_theta = combine_slice_verdicts(slices).verdict;
  }

  const bool st_inc = rep.family_st_direction == Direction::Increasing ||
                      rep.family_st_direction == Direction::Constant;
  const bool st_dec = rep.family_st_direction == Direction::Decreasing ||
                      rep.family_st_direction == Direction::Constant;
  const bool opposed = (st_inc && weakly_decreasing(rep.phi_in_v)) ||
                       (st_dec && weakly_increasing(rep.phi_in_v));
  const bool aligned = (st_inc && weakly_increasing(rep.phi_in_v)) ||
                       (st_dec && weakly_decreasing(rep.phi_in_v));
  if (opposed && weakly_decreasing(rep.phi_in_theta)) {
    rep.pattern = 1;
    rep.premises_hold = true;
    rep.conclusion_matches = weakly_decreasing(rep.expectation);
  } else if (aligned && weakly_increasing(rep.phi_in_theta)) {
    rep.pattern = 2;
    rep.premises_hold = true;
    rep.conclusion_matches = weakly_increasing(rep.expectation);
  }
  const double decisive = 10.0 * tol.sign_slack;
  rep.anomaly = rep.premises_hold && !rep.conclusion_matches &&
                rep.expectation.margin > decisive;
  return rep;
}

DensityIdentityReport verify_density_identity(const EahmModel& m,
                                              const Grid& x_grid,
                                              const QuadratureSpec& spec,
                                              double representation_tol,
                                              double derivative_tol) {
  DensityIdentityReport rep;
  rep.representation_tol = representation_tol;
  rep.derivative_tol = derivative_tol;
  const double h = 1e-4;
  const auto& jumps = m.baseline().hazard_discontinuities();
  auto near_jump = [&jumps, h](double x) {
    for (double b : jumps)
      if (std::fabs(x - b) <= 2.0 * h) return true;
    return false;
  };

  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    const double f1 = overall_density(m, x, spec);
    const double f2 = overall_density_split(m, x, spec);
    rep.max_representation_gap =
        std::max(rep.max_representation_gap, std::fabs(f1 - f2));

    if (near_jump(x)) {
      ++rep.skipped_points;
      continue;
    }
    double deriv;
    if (x < h) {
      // Second-order one-sided stencil at the left edge.
      const double s0 = overall_survival(m, x, spec);
      const double s1 = overall_survival(m, x + h, spec);
      const double s2 = overall_survival(m, x + 2.0 * h, spec);
      deriv = (-3.0 * s0 + 4.0 * s1 - s2) / (2.0 * h);
    } else {
      const double sm = overall_survival(m, x - h, spec);
      const double sp = overall_survival(m, x + h, spec);
      deriv = (sp - sm) / (2.0 * h);
    }
    rep.max_derivative_gap = std::max(rep.max_derivative_gap, std::fabs(f1 + deriv));
  }
  rep.pass = rep.max_representation_gap <= representation_tol &&
             rep.max_derivative_gap <= derivative_tol;
  return rep;
}

std::vector<WIdentitySample> make_w_identity_samples(const EahmModel& m,
                                                     std::uint64_t seed,
                                                     std::size_t n) {
  if (n == 0) throw ConfigError("w-identity sampling needs n >= 1");
  Rng rng(seed);
  std::vector<WIdentitySample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    WIdentitySample s;
    s.x = 10.0 * rng.uniform01();
    s.theta = 5.0 * rng.uniform01();
    s.z = m.covariate().quantile(rng.uniform01());
    out.push_back(s);
  }
  return out;
}

double verify_w_identity(const CovariateEffect& effect,
                         std::span<const WIdentitySample> samples,
                         const QuadratureSpec& spec) {
  double worst = 0.0;
  for (const auto& s : samples) {
    const double lhs =
        effect.cumulative(s.theta, s.z, spec) - effect.cumulative(s.x + s.theta, s.z, spec);
    IntegrationResult shifted = integrate_1d(
        [&effect, &s](double t) { return effect.value(t + s.theta, s.z); }, 0.0,
        s.x, spec);
    if (!shifted.converged)
      throw QuadratureError("shifted effect integral did not converge");
    worst = std::max(worst, std::fabs(lhs + shifted.value));
  }
  return worst;
}

RatioDlrReport verify_ratio_dlr_equivalence(const EahmModel& m,
                                            std::span<const double> x_values,
                                            const Grid& theta_grid,
                                            const ToleranceProfile& tol,
                                            const QuadratureSpec& spec,
                                            double factorization_tol) {
  if (x_values.empty())
    throw ConfigError("ratio check needs at least one displacement x");
  RatioDlrReport rep;
  rep.factorization_tol = factorization_tol;
  rep.x_values.assign(x_values.begin(), x_values.end());

  // The ratios divide by densities that can be many orders of magnitude
  // below one, so an absolute quadrature floor would be amplified into a
  // visible factorization gap; drive these integrals by relative error only.
  QuadratureSpec tight = spec;
  tight.abs_tol = 0.0;

  const std::size_t nt = theta_grid.size();
  std::vector<double> f_at_theta(nt);
  for (std::size_t i = 0; i < nt; ++i)
    f_at_theta[i] = overall_density(m, theta_grid[i], tight);
  rep.dlr_verdict = check_ilr_dlr(f_at_theta, theta_grid, tol);

  bool all_ratios_weakly_increasing = true;
  for (double x : x_values) {
    if (!(x > 0.0)) throw DomainError("ratio displacements must be > 0");
    std::vector<double> ratios;
    ratios.reserve(nt);
    for (std::size_t i = 0; i < nt; ++i) {
      if (f_at_theta[i] < rep.exclusion_threshold) {
        ++rep.excluded_thetas;
        continue;
      }
      const double theta = theta_grid[i];
      const double num = overall_density(m, x + theta, tight);
      const double ratio = num / f_at_theta[i];
      ratios.push_back(ratio);

      // Factorization against the residual-life decomposition.
      const double srat = std::exp(-(m.baseline().cumulative_hazard(x + theta) -
                                     m.baseline().cumulative_hazard(theta)));
      const double ephi = posterior_expectation(
          m, theta,
          [&m, x, theta](double v) { return phi_ratio(m, x, theta, v); },
          tight, WeightKind::Corrected);
      rep.max_factorization_gap =
          std::max(rep.max_factorization_gap, std::fabs(ratio - srat * ephi));
    }
    if (ratios.size() < 2)
      throw NumericError("too few usable ratio points (density underflow)");
    MonotonicityVerdict v = check_monotone_1d(ratios, tol);
    all_ratios_weakly_increasing =
        all_ratios_weakly_increasing && weakly_increasing(v);
    rep.ratio_verdicts.push_back(v);
  }
  rep.consistent = all_ratios_weakly_increasing == log_convex(rep.dlr_verdict);
  return rep;
}

SamplingReport verify_sampling_consistency(const EahmModel& m,
                                           std::uint64_t seed, std::size_t n,
                                           double alpha, const Grid& eval_grid,
                                           const QuadratureSpec& spec) {
  if (n < 1000)
    throw ConfigError("sampling consistency needs n >= 1000 for a useful bound");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("sampling consistency needs alpha in (0, 1)");
  SamplingReport rep;
  rep.n = n;
  rep.alpha = alpha;

  std::vector<double> samples = sample_lifetimes(m, seed, n);
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 0; i < eval_grid.size(); ++i) {
    const double x = eval_grid[i];
    const auto above = samples.end() -
                       std::upper_bound(samples.begin(), samples.end(), x);
    const double emp = static_cast<double>(above) / static_cast<double>(n);
    const double s = overall_survival(m, x, spec);
    rep.sup_distance = std::max(rep.sup_distance, std::fabs(emp - s));
  }
  rep.dkw_bound = std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
  rep.pass = rep.sup_distance <= rep.dkw_bound;
  return rep;
}

SearchOutcome search_counterexample(const Scenario& base) {
  if (!base.search)
    throw ConfigError("scenario has no search section");
  const SearchSettings& s = *base.search;
  SearchOutcome out;
  Rng rng(base.seed);

  for (std::size_t k = 0; k < s.budget; ++k) {
    json doc = base.source;
    doc.erase("search");
    for (const auto& r : s.ranges) {
      const double u = rng.uniform01();
      doc[r.component][r.param] = r.lo + u * (r.hi - r.lo);
    }
    try {
      Scenario candidate = parse_scenario(doc);
      PreservationReport rep = verify_dfr_to_dlr(
          candidate.model, candidate.make_x_grid(), candidate.make_z_grid(),
          candidate.tol_profile(), candidate.quad_spec());
      ++out.evaluated;

      const bool conclusion_fails = !rep.conclusion.holds;
      bool hypothesis_fails = !rep.failed_hypotheses.empty();
      if (s.hypothesis > 0)
        hypothesis_fails =
            std::find(rep.failed_hypotheses.begin(), rep.failed_hypotheses.end(),
                      s.hypothesis) != rep.failed_hypotheses.end();

      bool match = false;
      if (s.target == "conclusion-fails") match = conclusion_fails;
      else if (s.target == "hypothesis-fails") match = hypothesis_fails;
      else match = hypothesis_fails && conclusion_fails;

      if (match) {
        out.found = true;
        out.scenario = std::move(candidate);
        out.report = std::move(rep);
        return out;
      }
    } catch (const ConfigError&) {
      ++out.invalid_candidates;
    } catch (const NumericError&) {
      ++out.invalid_candidates;
    }
  }
  return out;
}

}  // namespace eahm
