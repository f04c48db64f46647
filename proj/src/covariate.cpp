#include "eahm/covariate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/gamma.hpp>

#include "eahm/errors.hpp"

namespace eahm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

boost::math::gamma_distribution<double> boost_gamma(double shape, double rate) {
  return boost::math::gamma_distribution<double>(shape, 1.0 / rate);
}

}  // namespace

CovariateDistribution CovariateDistribution::exponential(double rate) {
  if (!std::isfinite(rate) || !(rate > 0.0))
    throw DomainError("covariate exponential rate must be > 0");
  return CovariateDistribution(Family::Exponential, rate, 0.0);
}

CovariateDistribution CovariateDistribution::gamma(double shape, double rate) {
  if (!std::isfinite(shape) || !(shape > 0.0))
    throw DomainError("covariate gamma shape must be > 0");
  if (!std::isfinite(rate) || !(rate > 0.0))
    throw DomainError("covariate gamma rate must be > 0");
  return CovariateDistribution(Family::Gamma, shape, rate);
}

CovariateDistribution CovariateDistribution::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw DomainError("covariate uniform bounds must be finite");
  if (lo < 0.0) throw DomainError("covariate support must lie in [0, inf)");
  if (!(hi > lo)) throw DomainError("covariate uniform needs hi > lo");
  return CovariateDistribution(Family::Uniform, lo, hi);
}

CovariateDistribution CovariateDistribution::discrete(std::vector<double> atoms,
                                                      std::vector<double> weights) {
  if (atoms.empty()) throw DomainError("discrete covariate needs at least one atom");
  if (atoms.size() != weights.size())
    throw DomainError("discrete covariate needs one weight per atom");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&atoms](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
  std::vector<double> a_sorted, w_sorted;
  a_sorted.reserve(atoms.size());
  w_sorted.reserve(atoms.size());
  double total = 0.0;
  for (std::size_t idx : order) {
    const double a = atoms[idx], w = weights[idx];
    if (!std::isfinite(a) || a < 0.0)
      throw DomainError("discrete covariate atoms must be finite and >= 0");
    if (!std::isfinite(w) || !(w > 0.0))
      throw DomainError("discrete covariate weights must be > 0");
    if (!a_sorted.empty() && a == a_sorted.back())
      throw DomainError("discrete covariate atoms must be distinct");
    a_sorted.push_back(a);
    w_sorted.push_back(w);
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw DomainError("discrete covariate weights must sum to 1 (within 1e-9)");
  CovariateDistribution d(Family::Discrete, 0.0, 0.0);
  d.atoms_ = std::move(a_sorted);
  d.weights_ = std::move(w_sorted);
  return d;
}

double CovariateDistribution::density(double z) const {
  switch (family_) {
    case Family::Exponential:
      return z < 0.0 ? 0.0 : p1_ * std::exp(-p1_ * z);
    case Family::Gamma:
      return z < 0.0 ? 0.0 : boost::math::pdf(boost_gamma(p1_, p2_), z);
    case Family::Uniform:
      return (z < p1_ || z > p2_) ? 0.0 : 1.0 / (p2_ - p1_);
    case Family::Discrete:
      throw DomainError("discrete covariate has no density");
  }
  throw NumericError("unreachable covariate family");
}

double CovariateDistribution::cdf(double z) const {
  switch (family_) {
    case Family::Exponential:
      return z <= 0.0 ? 0.0 : -std::expm1(-p1_ * z);
    case Family::Gamma:
      return z <= 0.0 ? 0.0 : boost::math::cdf(boost_gamma(p1_, p2_), z);
    case Family::Uniform:
      if (z <= p1_) return 0.0;
      if (z >= p2_) return 1.0;
      return (z - p1_) / (p2_ - p1_);
    case Family::Discrete: {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i)
        if (atoms_[i] <= z) acc += weights_[i];
      return acc;
    }
  }
  throw NumericError("unreachable covariate family");
}

double CovariateDistribution::quantile(double p) const {
  if (std::isnan(p) || p < 0.0 || p > 1.0)
    throw DomainError("quantile needs p in [0, 1]");
  switch (family_) {
    case Family::Exponential:
      return p >= 1.0 ? kInf : -std::log1p(-p) / p1_;
    case Family::Gamma:
      if (p >= 1.0) return kInf;
      if (p <= 0.0) return 0.0;
      return boost::math::quantile(boost_gamma(p1_, p2_), p);
    case Family::Uniform:
      return p1_ + p * (p2_ - p1_);
    case Family::Discrete: {
      double acc = 0.0;
      for (std::size_t i = 0; i < atoms_.size(); ++i) {
        acc += weights_[i];
        // Weight sums carry rounding noise; the slack keeps p = 1 in range.
        if (p <= acc + 1e-12) return atoms_[i];
      }
      return atoms_.back();
    }
  }
  throw NumericError("unreachable covariate family");
}

double CovariateDistribution::support_lo() const {
  switch (family_) {
    case Family::Exponential:
    case Family::Gamma:
      return 0.0;
    case Family::Uniform:
      return p1_;
    case Family::Discrete:
      return atoms_.front();
  }
  throw NumericError("unreachable covariate family");
}

double CovariateDistribution::support_hi() const {
  switch (family_) {
    case Family::Exponential:
    case Family::Gamma:
      return kInf;
    case Family::Uniform:
      return p2_;
    case Family::Discrete:
      return atoms_.back();
  }
  throw NumericError("unreachable covariate family");
}

const std::vector<double>& CovariateDistribution::atoms() const {
  if (family_ != Family::Discrete)
    throw DomainError("atoms() is only defined for discrete covariates");
  return atoms_;
}

const std::vector<double>& CovariateDistribution::weights() const {
  if (family_ != Family::Discrete)
    throw DomainError("weights() is only defined for discrete covariates");
  return weights_;
}

double CovariateDistribution::sample(Rng& rng) const {
  return quantile(rng.uniform01());
}

std::vector<std::pair<std::string, double>> CovariateDistribution::parameters() const {
  switch (family_) {
    case Family::Exponential:
      return {{"rate", p1_}};
    case Family::Gamma:
      return {{"shape", p1_}, {"rate", p2_}};
    case Family::Uniform:
      return {{"lo", p1_}, {"hi", p2_}};
    case Family::Discrete: {
      std::vector<std::pair<std::string, double>> out;
      for (std::size_t i = 0; i < atoms_.size(); ++i)
        out.emplace_back("atom_" + std::to_string(i), atoms_[i]);
      for (std::size_t i = 0; i < weights_.size(); ++i)
        out.emplace_back("weight_" + std::to_string(i), weights_[i]);
      return out;
    }
  }
  return {};
}

IntegrationResult expect_over_covariate(const CovariateDistribution& dist,
                                        const std::function<double(double)>& fn,
                                        const QuadratureSpec& spec) {
  if (dist.is_discrete()) {
    IntegrationResult res;
    const auto& atoms = dist.atoms();
    const auto& weights = dist.weights();
    for (std::size_t i = 0; i < atoms.size(); ++i)
      res.value += weights[i] * fn(atoms[i]);
    res.evaluations = atoms.size();
    res.error = 0.0;
    res.converged = true;
    return res;
  }
  const double lo = dist.support_lo();
  double hi = dist.support_hi();
  if (std::isinf(hi)) hi = dist.quantile(spec.tail_quantile);
  auto integrand = [&dist, &fn](double z) { return fn(z) * dist.density(z); };
  return integrate_1d(integrand, lo, hi, spec);
}

}  // namespace eahm
