#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eahm/quadrature.hpp"
#include "eahm/rng.hpp"

namespace eahm {

// Distribution of the frailty covariate Z (support within [0, inf)).
// Continuous families expose a density; the discrete family exposes atoms
// and weights and its expectations are exact finite sums.
class CovariateDistribution {
public:
  enum class Family { Exponential, Gamma, Uniform, Discrete };

  static CovariateDistribution exponential(double rate);
  static CovariateDistribution gamma(double shape, double rate);
  static CovariateDistribution uniform(double lo, double hi);
  // Atoms need not arrive sorted; they are sorted (with their weights) on
  // construction.  Weights must be positive and sum to 1 within 1e-9.
  static CovariateDistribution discrete(std::vector<double> atoms,
                                        std::vector<double> weights);

  bool is_discrete() const { return family_ == Family::Discrete; }
  Family family() const { return family_; }

  double density(double z) const;   // continuous families only
  double cdf(double z) const;
  double quantile(double p) const;  // p in [0, 1]; inverse cdf
  double support_lo() const;
  double support_hi() const;        // +inf for unbounded supports

  const std::vector<double>& atoms() const;    // discrete only
  const std::vector<double>& weights() const;  // discrete only

  // Inverse-transform draw consuming exactly one uniform from rng.
  double sample(Rng& rng) const;

  std::vector<std::pair<std::string, double>> parameters() const;

private:
  CovariateDistribution(Family f, double p1, double p2)
      : family_(f), p1_(p1), p2_(p2) {}

  Family family_;
  double p1_ = 0.0;
  double p2_ = 0.0;
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

// E[fn(Z)].  Continuous: adaptive quadrature of fn * density over the
// support truncated at spec.tail_quantile.  Discrete: exact weighted sum
// (error 0, converged).
IntegrationResult expect_over_covariate(const CovariateDistribution& dist,
                                        const std::function<double(double)>& fn,
                                        const QuadratureSpec& spec = {});

}  // namespace eahm
