#include "eahm/effect.hpp"

#include <cmath>
#include <utility>

#include "eahm/errors.hpp"

namespace eahm {
namespace {

void check_nonneg_args(double x, double z) {
  if (std::isnan(x) || x < 0.0) throw DomainError("effect argument x must be >= 0");
  if (std::isnan(z) || z < 0.0) throw DomainError("effect argument z must be >= 0");
}

}  // namespace

CovariateEffect CovariateEffect::constant_in_time(double intercept, double slope) {
  if (!std::isfinite(intercept) || intercept < 0.0)
    throw DomainError("effect intercept must be >= 0");
  if (!std::isfinite(slope) || slope < 0.0)
    throw DomainError("effect slope must be >= 0");
  return CovariateEffect(Family::ConstantInTime, intercept, slope, Psi::One, 1.0);
}

CovariateEffect CovariateEffect::separable(Psi psi, double beta) {
  if (!std::isfinite(beta) || !(beta > 0.0))
    throw DomainError("effect decay beta must be > 0");
  return CovariateEffect(Family::Separable, 0.0, 1.0, psi, beta);
}

CovariateEffect CovariateEffect::affine(double intercept, double slope, Psi psi,
                                        double beta) {
  if (!std::isfinite(intercept) || intercept < 0.0)
    throw DomainError("effect intercept must be >= 0");
  if (!std::isfinite(slope) || slope < 0.0)
    throw DomainError("effect slope must be >= 0");
  if (!std::isfinite(beta) || !(beta > 0.0))
    throw DomainError("effect decay beta must be > 0");
  return CovariateEffect(Family::Affine, intercept, slope, psi, beta);
}

CovariateEffect CovariateEffect::custom(std::function<double(double, double)> a,
                                        std::function<double(double, double)> cumulative) {
  if (!a) throw ConfigError("custom effect needs a function");
  CovariateEffect e(Family::Custom, 0.0, 0.0, Psi::One, 1.0);
  e.fn_ = std::move(a);
  e.wfn_ = std::move(cumulative);
  return e;
}

double CovariateEffect::psi_value(double x) const {
  switch (psi_) {
    case Psi::One:
      return 1.0;
    case Psi::ExpDecay:
      return std::exp(-beta_ * x);
    case Psi::InverseTime:
      return 1.0 / (1.0 + x);
  }
  throw NumericError("unreachable psi kind");
}

double CovariateEffect::psi_antiderivative(double x) const {
  switch (psi_) {
    case Psi::One:
      return x;
    case Psi::ExpDecay:
      return -std::expm1(-beta_ * x) / beta_;
    case Psi::InverseTime:
      return std::log1p(x);
  }
  throw NumericError("unreachable psi kind");
}

double CovariateEffect::value(double x, double z) const {
  check_nonneg_args(x, z);
  if (family_ == Family::Custom) {
    const double a = fn_(x, z);
    if (std::isnan(a) || a < 0.0)
      throw DomainError("custom effect returned a negative or NaN value");
    return a;
  }
  return c0_ + c1_ * z * psi_value(x);
}

double CovariateEffect::cumulative(double x, double z) const {
  return cumulative(x, z, QuadratureSpec{});
}

double CovariateEffect::cumulative(double x, double z,
                                   const QuadratureSpec& spec) const {
  check_nonneg_args(x, z);
  if (family_ == Family::Custom) {
    if (wfn_) return wfn_(x, z);
    IntegrationResult r =
        integrate_1d([this, z](double t) { return fn_(t, z); }, 0.0, x, spec);
    if (!r.converged)
      throw QuadratureError("cumulative effect integral did not converge");
    return r.value;
  }
  return c0_ * x + c1_ * z * psi_antiderivative(x);
}

bool CovariateEffect::has_closed_form_cumulative() const {
  return family_ != Family::Custom || static_cast<bool>(wfn_);
}

std::vector<std::pair<std::string, double>> CovariateEffect::parameters() const {
  switch (family_) {
    case Family::ConstantInTime:
      return {{"intercept", c0_}, {"slope", c1_}};
    case Family::Separable:
      return psi_ == Psi::ExpDecay
                 ? std::vector<std::pair<std::string, double>>{{"beta", beta_}}
                 : std::vector<std::pair<std::string, double>>{};
    case Family::Affine: {
      std::vector<std::pair<std::string, double>> out = {{"intercept", c0_},
                                                         {"slope", c1_}};
      if (psi_ == Psi::ExpDecay) out.emplace_back("beta", beta_);
      return out;
    }
    case Family::Custom:
      return {};
  }
  return {};
}

}  // namespace eahm
