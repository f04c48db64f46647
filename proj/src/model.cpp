#include "eahm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eahm/errors.hpp"

namespace eahm {
namespace {

constexpr double kProbeHorizon = 1e6;
constexpr double kProbeMidHorizon = 1e3;
// exp(-40) ~ 4e-18: mass beyond the horizon is negligible iff the total
// cumulative hazard reaches at least this.
constexpr double kProperHazard = 40.0;
// S* below this is treated as an underflow for ratio purposes.
constexpr double kTinySurvival = 1e-300;

void check_x(double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("x must be >= 0");
}

void check_z_in_support(const EahmModel& m, double z) {
  const auto& cov = m.covariate();
  if (std::isnan(z)) throw DomainError("z must not be NaN");
  if (cov.is_discrete()) {
    for (double a : cov.atoms())
      if (std::fabs(z - a) <= 1e-12 * std::max(1.0, std::fabs(a))) return;
    throw DomainError("z must be an atom of the discrete covariate");
  }
  if (z < cov.support_lo() || z > cov.support_hi())
    throw DomainError("z outside the covariate support");
}

std::vector<double> covariate_probe_points(const CovariateDistribution& cov) {
  if (cov.is_discrete()) return cov.atoms();
  return {cov.quantile(0.05), cov.quantile(0.5), cov.quantile(0.95)};
}

}  // namespace

EahmModel::EahmModel(BaselineModel baseline, CovariateEffect effect,
                     CovariateDistribution covariate)
    : baseline_(std::move(baseline)),
      effect_(std::move(effect)),
      covariate_(std::move(covariate)) {
  probe_ = covariate_probe_points(covariate_);
  bool unbounded = !probe_.empty();
  for (double z : probe_) {
    const double w_far = effect_.cumulative(kProbeHorizon, z);
    const double total = baseline_.cumulative_hazard(kProbeHorizon) + w_far;
    if (!(total >= kProperHazard))
      throw ConfigError(
          "model is not proper: cumulative hazard stays bounded at covariate "
          "value z = " +
          std::to_string(z));
    // Growth probe for the informational flag: w keeps growing between the
    // mid and far horizons (and is not simply zero).
    const double w_mid = effect_.cumulative(kProbeMidHorizon, z);
    const bool grows = w_far > 0.0 && w_far >= 1.5 * w_mid && w_far > 1e-8;
    unbounded = unbounded && grows;
  }
  effect_unbounded_ = unbounded;
}

double conditional_hazard(const EahmModel& m, double x, double z) {
  check_x(x);
  check_z_in_support(m, z);
  return m.baseline().hazard(x) + m.effect().value(x, z);
}

double conditional_log_survival(const EahmModel& m, double x, double z) {
  check_x(x);
  check_z_in_support(m, z);
  return -(m.baseline().cumulative_hazard(x) + m.effect().cumulative(x, z));
}

double conditional_survival(const EahmModel& m, double x, double z) {
  // Single exponentiation of -(H + w); no exp(-H) * exp(-w) products.
  return std::exp(conditional_log_survival(m, x, z));
}

double conditional_density(const EahmModel& m, double x, double z) {
  return conditional_hazard(m, x, z) * conditional_survival(m, x, z);
}

double overall_log_survival(const EahmModel& m, double x,
                            const QuadratureSpec& spec) {
  check_x(x);
  IntegrationResult mix = expect_over_covariate(
      m.covariate(),
      [&m, x](double z) { return std::exp(-m.effect().cumulative(x, z)); },
      spec);
  if (!mix.converged)
    throw QuadratureError("overall survival mixture did not converge");
  if (!(mix.value > 0.0)) return -std::numeric_limits<double>::infinity();
  return -m.baseline().cumulative_hazard(x) + std::log(mix.value);
}

double overall_survival(const EahmModel& m, double x,
                        const QuadratureSpec& spec) {
  return std::exp(overall_log_survival(m, x, spec));
}

double overall_density(const EahmModel& m, double x, const QuadratureSpec& spec) {
  check_x(x);
  // f*(x) = S(x) * E[(h(x) + a(x,Z)) exp(-w(x,Z))], folded into one exp of
  // -(H + w) per covariate point.
  const double H = m.baseline().cumulative_hazard(x);
  const double h = m.baseline().hazard(x);
  IntegrationResult mix = expect_over_covariate(
      m.covariate(),
      [&m, x, h, H](double z) {
        const double lw = H + m.effect().cumulative(x, z);
        return (h + m.effect().value(x, z)) * std::exp(-lw);
      },
      spec);
  if (!mix.converged)
    throw QuadratureError("overall density mixture did not converge");
  return std::max(0.0, mix.value);
}

double overall_density_split(const EahmModel& m, double x,
                             const QuadratureSpec& spec) {
  check_x(x);
  IntegrationResult e_surv = expect_over_covariate(
      m.covariate(),
      [&m, x](double z) { return std::exp(-m.effect().cumulative(x, z)); },
      spec);
  IntegrationResult e_eff = expect_over_covariate(
      m.covariate(),
      [&m, x](double z) {
        return m.effect().value(x, z) * std::exp(-m.effect().cumulative(x, z));
      },
      spec);
  if (!e_surv.converged || !e_eff.converged)
    throw QuadratureError("overall density mixture did not converge");
  return m.baseline().density(x) * e_surv.value +
         m.baseline().survival(x) * e_eff.value;
}

double overall_hazard(const EahmModel& m, double x, const QuadratureSpec& spec) {
  const double s = overall_survival(m, x, spec);
  if (!(s > kTinySurvival))
    throw UnderflowError("overall survival underflowed; hazard undefined here");
  return overall_density(m, x, spec) / s;
}

namespace {

// Unnormalized age-theta covariate weight at v (times the base density for
// continuous covariates, times the atom weight for discrete ones).
double weight_numerator(const EahmModel& m, double theta, double v,
                        WeightKind kind) {
  const double hstar = m.baseline().hazard(theta) + m.effect().value(theta, v);
  if (kind == WeightKind::AsPrinted) return hstar;
  return hstar * std::exp(-m.effect().cumulative(theta, v));
}

}  // namespace

double posterior_weight_density(const EahmModel& m, double theta, double v,
                                const QuadratureSpec& spec, WeightKind kind) {
  check_x(theta);
  check_z_in_support(m, v);
  const auto& cov = m.covariate();
  IntegrationResult norm = expect_over_covariate(
      cov, [&](double z) { return weight_numerator(m, theta, z, kind); }, spec);
  if (!norm.converged)
    throw QuadratureError("posterior weight normalizer did not converge");
  if (!(norm.value > 0.0))
    throw UnderflowError("posterior weight normalizer vanished");
  if (cov.is_discrete()) {
    const auto& atoms = cov.atoms();
    const auto& weights = cov.weights();
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (std::fabs(v - atoms[i]) <= 1e-12 * std::max(1.0, std::fabs(atoms[i])))
        return weights[i] * weight_numerator(m, theta, v, kind) / norm.value;
    throw DomainError("v must be an atom of the discrete covariate");
  }
  return cov.density(v) * weight_numerator(m, theta, v, kind) / norm.value;
}

double posterior_expectation(const EahmModel& m, double theta,
                             const std::function<double(double)>& fn,
                             const QuadratureSpec& spec, WeightKind kind) {
  check_x(theta);
  IntegrationResult num = expect_over_covariate(
      m.covariate(),
      [&](double z) { return fn(z) * weight_numerator(m, theta, z, kind); },
      spec);
  IntegrationResult den = expect_over_covariate(
      m.covariate(), [&](double z) { return weight_numerator(m, theta, z, kind); },
      spec);
  if (!num.converged || !den.converged)
    throw QuadratureError("posterior expectation did not converge");
  if (!(den.value > 0.0))
    throw UnderflowError("posterior weight normalizer vanished");
  return num.value / den.value;
}

double phi_ratio(const EahmModel& m, double x, double theta, double v) {
  check_x(x);
  check_x(theta);
  check_z_in_support(m, v);
  const double h_num = m.baseline().hazard(x + theta) + m.effect().value(x + theta, v);
  const double h_den = m.baseline().hazard(theta) + m.effect().value(theta, v);
  if (!(h_den > 0.0))
    throw DomainError("phi_ratio needs a positive conditional hazard at theta");
  // w(theta, v) - w(x + theta, v) <= 0, so the exp cannot overflow.
  const double dw = m.effect().cumulative(theta, v) -
                    m.effect().cumulative(x + theta, v);
  return std::exp(dw) * (h_num / h_den);
}

std::vector<double> sample_lifetimes(const EahmModel& m, std::uint64_t seed,
                                     std::size_t n, const QuadratureSpec& spec) {
  if (n == 0) throw ConfigError("sample_lifetimes needs n >= 1");
  (void)spec;  // reserved for custom effects with numeric cumulative
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = m.covariate().sample(rng);
    const double target = -std::log(rng.uniform01());
    auto gap = [&](double x) {
      return m.baseline().cumulative_hazard(x) + m.effect().cumulative(x, z) -
             target;
    };
    // gap(0) = -target < 0; double an upper bound until the sign flips.
    double lo = 0.0, hi = 1.0;
    while (gap(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e9)
        throw BracketError("lifetime inversion found no bracket below 1e9");
    }
    out.push_back(root_find_monotone(gap, lo, hi, 1e-12));
  }
  return out;
}

}  // namespace eahm
