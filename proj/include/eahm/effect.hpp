#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eahm/quadrature.hpp"

namespace eahm {

// Additive covariate effect a(x, z) >= 0 and its running integral
// w(x, z) = integral of a(t, z) dt over [0, x].  The built-in families all
// have the shape a = intercept + slope * z * psi(x) with a closed-form w;
// arbitrary effects can be wrapped via custom(), in which case w falls back
// to adaptive quadrature unless a closed form is supplied.
class CovariateEffect {
public:
  enum class Psi {
    One,         // psi(x) = 1,            Psi(x) = x
    ExpDecay,    // psi(x) = exp(-beta x),  Psi(x) = (1 - exp(-beta x)) / beta
    InverseTime  // psi(x) = 1 / (1 + x),   Psi(x) = log(1 + x)
  };
  enum class Family { ConstantInTime, Separable, Affine, Custom };

  // a(x, z) = intercept + slope * z (no time dependence).
  static CovariateEffect constant_in_time(double intercept, double slope);
  // a(x, z) = z * psi(x).
  static CovariateEffect separable(Psi psi, double beta = 1.0);
  // a(x, z) = intercept + slope * z * psi(x).
  static CovariateEffect affine(double intercept, double slope, Psi psi,
                                double beta = 1.0);
  static CovariateEffect zero() { return constant_in_time(0.0, 0.0); }
  // Caller promises a >= 0 on [0,inf) x support.  cumulative is optional.
  static CovariateEffect custom(std::function<double(double, double)> a,
                                std::function<double(double, double)> cumulative = {});

  double value(double x, double z) const;       // a(x, z)
  double cumulative(double x, double z) const;  // w(x, z)
  // Custom effects without a closed-form w integrate numerically under the
  // given control; throws QuadratureError on budget exhaustion.
  double cumulative(double x, double z, const QuadratureSpec& spec) const;

  bool has_closed_form_cumulative() const;
  Family family() const { return family_; }
  Psi psi() const { return psi_; }
  std::vector<std::pair<std::string, double>> parameters() const;

private:
  CovariateEffect(Family f, double c0, double c1, Psi psi, double beta)
      : family_(f), c0_(c0), c1_(c1), psi_(psi), beta_(beta) {}

  double psi_value(double x) const;
  double psi_antiderivative(double x) const;

  Family family_;
  double c0_ = 0.0;
  double c1_ = 0.0;
  Psi psi_ = Psi::One;
  double beta_ = 1.0;
  std::function<double(double, double)> fn_;
  std::function<double(double, double)> wfn_;
};

}  // namespace eahm
