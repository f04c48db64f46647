#pragma once

#include <cstdint>
#include <vector>

#include "eahm/baseline.hpp"
#include "eahm/covariate.hpp"
#include "eahm/effect.hpp"
#include "eahm/quadrature.hpp"

namespace eahm {

// Lifetime model with conditional hazard  h(x) + a(x, z)  given Z = z, with
// Z random.  The unconditional ("overall") law is the covariate mixture of
// the conditional ones.
class EahmModel {
public:
  // Validates the assembled model: the all-cause cumulative hazard
  // H(x) + w(x, z) must be unbounded at representative covariate values,
  // otherwise lifetimes would have positive mass at infinity and the
  // constructor throws ConfigError.
  EahmModel(BaselineModel baseline, CovariateEffect effect,
            CovariateDistribution covariate);

  const BaselineModel& baseline() const { return baseline_; }
  const CovariateEffect& effect() const { return effect_; }
  const CovariateDistribution& covariate() const { return covariate_; }

  // Informational: whether the cumulative effect w(x, z) itself appears to
  // grow without bound in x at the representative covariate values (the
  // baseline alone may already make the model proper when this is false).
  bool effect_cumulative_unbounded() const { return effect_unbounded_; }

  // Covariate values used for the properness probe (distribution quantiles,
  // or the atoms for a discrete covariate).
  const std::vector<double>& probe_points() const { return probe_; }

private:
  BaselineModel baseline_;
  CovariateEffect effect_;
  CovariateDistribution covariate_;
  bool effect_unbounded_ = false;
  std::vector<double> probe_;
};

// ---- conditional quantities (given Z = z) --------------------------------
// x must be >= 0 and z must lie in the covariate support (an atom, for
// discrete covariates); violations raise DomainError.

double conditional_hazard(const EahmModel& m, double x, double z);
double conditional_log_survival(const EahmModel& m, double x, double z);
double conditional_survival(const EahmModel& m, double x, double z);
double conditional_density(const EahmModel& m, double x, double z);

// ---- overall (mixture) quantities ----------------------------------------
// Throw QuadratureError if the covariate expectation fails to converge.

double overall_log_survival(const EahmModel& m, double x,
                            const QuadratureSpec& spec = {});
double overall_survival(const EahmModel& m, double x,
                        const QuadratureSpec& spec = {});
double overall_density(const EahmModel& m, double x,
                       const QuadratureSpec& spec = {});
// Alternative route to the same density, splitting the mixture into a
// baseline-density part and an effect part.  Kept deliberately independent
// of overall_density so the two can cross-check each other.
double overall_density_split(const EahmModel& m, double x,
                             const QuadratureSpec& spec = {});
// f*(x) / S*(x); throws UnderflowError once S*(x) is too small to divide by.
double overall_hazard(const EahmModel& m, double x,
                      const QuadratureSpec& spec = {});

// ---- residual-life machinery ---------------------------------------------

// How the covariate is reweighted at a given age.  Corrected keeps the
// survival factor exp(-w(theta, v)) inside the weight; AsPrinted drops that
// factor and is retained only to demonstrate the difference.
enum class WeightKind { Corrected, AsPrinted };

// Density (continuous Z) or mass (discrete Z, with v an atom) of the
// age-theta covariate reweighting, normalized over the support.
double posterior_weight_density(const EahmModel& m, double theta, double v,
                                const QuadratureSpec& spec = {},
                                WeightKind kind = WeightKind::Corrected);

// Expectation of fn(V) under that reweighting.
double posterior_expectation(const EahmModel& m, double theta,
                             const std::function<double(double)>& fn,
                             const QuadratureSpec& spec = {},
                             WeightKind kind = WeightKind::Corrected);

// exp(w(theta, v) - w(x + theta, v)) * h*(x + theta | v) / h*(theta | v):
// the conditional part of the density ratio f*(x + theta) / f*(theta).
double phi_ratio(const EahmModel& m, double x, double theta, double v);

// ---- simulation ------------------------------------------------------------

// n inverse-transform lifetime draws.  Per draw: one uniform for Z via its
// quantile, one uniform u for the lifetime, then solve
// H(x) + w(x, Z) = -log(u) by bracketed root finding.  Deterministic in seed.
std::vector<double> sample_lifetimes(const EahmModel& m, std::uint64_t seed,
                                     std::size_t n,
                                     const QuadratureSpec& spec = {});

}  // namespace eahm
