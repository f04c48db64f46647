#include "eahm/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "eahm/errors.hpp"

namespace eahm {
namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

void require_nonneg_x(double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("lifetime argument x must be >= 0");
}

}  // namespace

BaselineModel BaselineModel::exponential(double rate) {
  require_finite(rate, "exponential rate");
  if (!(rate > 0.0)) throw DomainError("exponential rate must be > 0");
  return BaselineModel(Family::Exponential, rate, 0.0);
}

BaselineModel BaselineModel::weibull(double shape, double scale) {
  require_finite(shape, "weibull shape");
  require_finite(scale, "weibull scale");
  if (!(shape > 0.0)) throw DomainError("weibull shape must be > 0");
  if (!(scale > 0.0)) throw DomainError("weibull scale must be > 0");
  return BaselineModel(Family::Weibull, shape, scale);
}

BaselineModel BaselineModel::gompertz(double level, double shape) {
  require_finite(level, "gompertz level");
  require_finite(shape, "gompertz shape");
  if (!(level > 0.0)) throw DomainError("gompertz level must be > 0");
  return BaselineModel(Family::Gompertz, level, shape);
}

BaselineModel BaselineModel::linear_hazard(double intercept, double slope) {
  require_finite(intercept, "linear hazard intercept");
  require_finite(slope, "linear hazard slope");
  if (intercept < 0.0) throw DomainError("linear hazard intercept must be >= 0");
  if (slope < 0.0)
    throw DomainError("linear hazard slope must be >= 0 (the hazard would go negative)");
  return BaselineModel(Family::LinearHazard, intercept, slope);
}

BaselineModel BaselineModel::piecewise_constant(std::vector<double> breaks,
                                                std::vector<double> rates) {
  if (rates.size() != breaks.size() + 1)
    throw DomainError("piecewise hazard needs exactly one more rate than breaks");
  for (double r : rates) {
    require_finite(r, "piecewise rate");
    if (r < 0.0) throw DomainError("piecewise rates must be >= 0");
  }
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    require_finite(breaks[i], "piecewise break");
    if (!(breaks[i] > 0.0)) throw DomainError("piecewise breaks must be > 0");
    if (i > 0 && !(breaks[i] > breaks[i - 1]))
      throw DomainError("piecewise breaks must be strictly increasing");
  }
  BaselineModel m(Family::PiecewiseConstant, 0.0, 0.0);
  m.breaks_ = std::move(breaks);
  m.rates_ = std::move(rates);
  return m;
}

double BaselineModel::hazard(double x) const {
  require_nonneg_x(x);
  switch (family_) {
    case Family::Exponential:
      return p1_;
    case Family::Weibull:
      // shape < 1 diverges at 0; IEEE pow delivers the right limits.
      return (p1_ / p2_) * std::pow(x / p2_, p1_ - 1.0);
    case Family::Gompertz:
      return p1_ * std::exp(p2_ * x);
    case Family::LinearHazard:
      return p1_ + p2_ * x;
    case Family::PiecewiseConstant: {
      const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
      return rates_[static_cast<std::size_t>(it - breaks_.begin())];
    }
  }
  throw NumericError("unreachable baseline family");
}

double BaselineModel::cumulative_hazard(double x) const {
  require_nonneg_x(x);
  switch (family_) {
    case Family::Exponential:
      return p1_ * x;
    case Family::Weibull:
      return std::pow(x / p2_, p1_);
    case Family::Gompertz:
      return p2_ == 0.0 ? p1_ * x : (p1_ / p2_) * std::expm1(p2_ * x);
    case Family::LinearHazard:
      return p1_ * x + 0.5 * p2_ * x * x;
    case Family::PiecewiseConstant: {
      double acc = 0.0, prev = 0.0;
      for (std::size_t i = 0; i < breaks_.size(); ++i) {
        if (x <= breaks_[i]) return acc + rates_[i] * (x - prev);
        acc += rates_[i] * (breaks_[i] - prev);
        prev = breaks_[i];
      }
      return acc + rates_.back() * (x - prev);
    }
  }
  throw NumericError("unreachable baseline family");
}

double BaselineModel::survival(double x) const {
  return std::exp(-cumulative_hazard(x));
}

double BaselineModel::density(double x) const {
  const double h = hazard(x);
  const double s = survival(x);
  // Weibull with shape < 1 has h(0) = inf, S(0) = 1; the density is inf there.
  return h * s;
}

const std::vector<double>& BaselineModel::piecewise_breaks() const {
  if (family_ != Family::PiecewiseConstant)
    throw DomainError("piecewise_breaks() needs a piecewise baseline");
  return breaks_;
}

const std::vector<double>& BaselineModel::piecewise_rates() const {
  if (family_ != Family::PiecewiseConstant)
    throw DomainError("piecewise_rates() needs a piecewise baseline");
  return rates_;
}

std::vector<std::pair<std::string, double>> BaselineModel::parameters() const {
  switch (family_) {
    case Family::Exponential:
      return {{"rate", p1_}};
    case Family::Weibull:
      return {{"shape", p1_}, {"scale", p2_}};
    case Family::Gompertz:
      return {{"level", p1_}, {"shape", p2_}};
    case Family::LinearHazard:
      return {{"intercept", p1_}, {"slope", p2_}};
    case Family::PiecewiseConstant: {
      std::vector<std::pair<std::string, double>> out;
      for (std::size_t i = 0; i < breaks_.size(); ++i)
        out.emplace_back("break_" + std::to_string(i), breaks_[i]);
      for (std::size_t i = 0; i < rates_.size(); ++i)
        out.emplace_back("rate_" + std::to_string(i), rates_[i]);
      return out;
    }
  }
  return {};
}

}  // namespace eahm
