#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "eahm/baseline.hpp"
#include "eahm/covariate.hpp"
#include "eahm/effect.hpp"
#include "eahm/errors.hpp"
#include "eahm/model.hpp"
#include "eahm/rng.hpp"

using namespace eahm;

namespace {

// Exponential(1) baseline with additive effect a(x, z) = z and Z ~ Exp(1).
// Closed forms: S*(x) = e^{-x} / (1+x), f*(x) = e^{-x} (x+2) / (1+x)^2,
// h*(x) = 1 + 1/(1+x).
EahmModel make_constant_effect_model() {
  return EahmModel(BaselineModel::exponential(1.0),
                   CovariateEffect::separable(CovariateEffect::Psi::One),
                   CovariateDistribution::exponential(1.0));
}

// Exponential(1) baseline with a(x, z) = z/(1+x) and Z ~ Exp(1).
// S*(1) = e^{-1} / (1 + ln 2).
EahmModel make_inverse_time_model() {
  return EahmModel(BaselineModel::exponential(1.0),
                   CovariateEffect::separable(CovariateEffect::Psi::InverseTime),
                   CovariateDistribution::exponential(1.0));
}

}  // namespace

TEST_CASE("baseline families match closed forms") {
  auto exp1 = BaselineModel::exponential(1.0);
  CHECK(exp1.hazard(3.0) == doctest::Approx(1.0));
  CHECK(exp1.cumulative_hazard(2.0) == doctest::Approx(2.0));
  CHECK(exp1.survival(1.0) == doctest::Approx(std::exp(-1.0)));

  auto wb = BaselineModel::weibull(2.0, 1.0);
  CHECK(wb.hazard(0.5) == doctest::Approx(1.0));          // 2 x
  CHECK(wb.cumulative_hazard(2.0) == doctest::Approx(4.0));  // x^2
  CHECK(wb.density(1.0) == doctest::Approx(2.0 * std::exp(-1.0)));

  auto gz = BaselineModel::gompertz(1.0, -0.5);
  CHECK(gz.hazard(0.0) == doctest::Approx(1.0));
  // H(x) = (level/shape)(e^{shape x} - 1) -> 2(1 - e^{-x/2})
  CHECK(gz.cumulative_hazard(2.0) ==
        doctest::Approx(2.0 * (1.0 - std::exp(-1.0))));

  auto lin = BaselineModel::linear_hazard(0.5, 0.2);
  CHECK(lin.hazard(2.0) == doctest::Approx(0.9));
  CHECK(lin.cumulative_hazard(2.0) == doctest::Approx(1.4));

  auto pw = BaselineModel::piecewise_constant({1.0, 2.0}, {1.0, 0.6, 0.4});
  CHECK(pw.hazard(0.5) == doctest::Approx(1.0));
  CHECK(pw.hazard(1.0) == doctest::Approx(0.6));  // right-continuous at breaks
  CHECK(pw.hazard(5.0) == doctest::Approx(0.4));
  CHECK(pw.cumulative_hazard(2.5) == doctest::Approx(1.0 + 0.6 + 0.2));
  REQUIRE(pw.hazard_discontinuities().size() == 2);

  CHECK_THROWS_AS(BaselineModel::weibull(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(BaselineModel::exponential(0.0), DomainError);
  CHECK_THROWS_AS(BaselineModel::linear_hazard(0.5, -0.1), DomainError);
  CHECK_THROWS_AS(BaselineModel::piecewise_constant({2.0, 1.0}, {1, 1, 1}),
                  DomainError);
}

TEST_CASE("covariate families match closed forms") {
  auto ez = CovariateDistribution::exponential(1.0);
  CHECK(ez.density(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(ez.cdf(1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(ez.quantile(0.5) == doctest::Approx(std::log(2.0)));

  auto gm = CovariateDistribution::gamma(2.0, 2.0);
  // mean shape/rate = 1; density 4 v e^{-2v}
  CHECK(gm.density(1.0) == doctest::Approx(4.0 * std::exp(-2.0)));
  CHECK(gm.cdf(gm.quantile(0.3)) == doctest::Approx(0.3).epsilon(1e-10));

  auto un = CovariateDistribution::uniform(0.5, 1.5);
  CHECK(un.density(1.0) == doctest::Approx(1.0));
  CHECK(un.quantile(0.25) == doctest::Approx(0.75));
  CHECK(un.support_hi() == doctest::Approx(1.5));

  auto dc = CovariateDistribution::discrete({2.0, 0.5, 1.0}, {0.3, 0.3, 0.4});
  REQUIRE(dc.atoms().size() == 3);
  CHECK(dc.atoms()[0] == doctest::Approx(0.5));  // sorted on construction
  CHECK(dc.cdf(1.0) == doctest::Approx(0.7));
  CHECK(dc.quantile(0.5) == doctest::Approx(1.0));
  CHECK(dc.quantile(0.95) == doctest::Approx(2.0));

  CHECK_THROWS_AS(CovariateDistribution::uniform(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(CovariateDistribution::discrete({1.0}, {0.5}), DomainError);
  CHECK_THROWS_AS(CovariateDistribution::discrete({1.0, 1.0}, {0.5, 0.5}),
                  DomainError);

  auto one_atom = CovariateDistribution::discrete({0.7}, {1.0});
  Rng r(9);
  CHECK(one_atom.sample(r) == doctest::Approx(0.7));
}

TEST_CASE("covariate expectations") {
  auto ez = CovariateDistribution::exponential(1.0);
  auto r = expect_over_covariate(ez, [](double) { return 1.0; });
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-9));

  // the integration domain is cut at the 1 - 1e-10 quantile, which costs
  // about (1+q)e^{-q} ~ 2.4e-9 of the mean
  auto mean = expect_over_covariate(ez, [](double v) { return v; });
  CHECK(mean.value == doctest::Approx(1.0).epsilon(1e-8));

  // E[e^{-ln(2) Z}] for Z ~ Exp(1) = 1/(1 + ln 2)
  auto lap = expect_over_covariate(
      ez, [](double v) { return std::exp(-std::log(2.0) * v); });
  CHECK(lap.value == doctest::Approx(0.59061610914964124974).epsilon(1e-10));

  auto dc = CovariateDistribution::discrete({0.5, 1.0, 2.0}, {0.3, 0.4, 0.3});
  auto dm = expect_over_covariate(dc, [](double v) { return v; });
  CHECK(dm.converged);
  CHECK(dm.error == 0.0);  // exact finite sum
  CHECK(dm.value == doctest::Approx(0.3 * 0.5 + 0.4 * 1.0 + 0.3 * 2.0));
}

TEST_CASE("effect values and cumulatives") {
  auto one = CovariateEffect::separable(CovariateEffect::Psi::One);
  CHECK(one.value(3.0, 0.5) == doctest::Approx(0.5));
  CHECK(one.cumulative(2.0, 1.5) == doctest::Approx(3.0));
  CHECK(one.has_closed_form_cumulative());

  auto inv = CovariateEffect::separable(CovariateEffect::Psi::InverseTime);
  CHECK(inv.value(1.0, 1.0) == doctest::Approx(0.5));
  CHECK(inv.cumulative(1.0, 2.0) == doctest::Approx(2.0 * std::log(2.0)));

  auto dec = CovariateEffect::separable(CovariateEffect::Psi::ExpDecay, 1.0);
  CHECK(dec.cumulative(1e9, 2.0) == doctest::Approx(2.0));  // bounded at z Psi(inf)

  auto aff = CovariateEffect::affine(0.2, 0.8, CovariateEffect::Psi::InverseTime);
  CHECK(aff.value(0.0, 1.0) == doctest::Approx(1.0));  // 0.2 + 0.8 * 1 * 1
  CHECK(aff.cumulative(1.0, 1.0) ==
        doctest::Approx(0.2 + 0.8 * std::log(2.0)));

  auto cit = CovariateEffect::constant_in_time(0.0, 1.0);
  CHECK(cit.value(7.0, 0.25) == doctest::Approx(0.25));
  CHECK(cit.cumulative(4.0, 0.25) == doctest::Approx(1.0));

  // numeric cumulative for a custom effect agrees with the closed form
  auto cust = CovariateEffect::custom(
      [](double x, double z) { return z / (1.0 + x); });
  CHECK_FALSE(cust.has_closed_form_cumulative());
  CHECK(cust.cumulative(1.0, 2.0) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));

  auto neg = CovariateEffect::custom(
      [](double x, double z) { return z - x; });
  CHECK_THROWS_AS(neg.value(2.0, 1.0), DomainError);  // a must be >= 0
}

TEST_CASE("conditional quantities") {
  auto m = make_constant_effect_model();
  CHECK(conditional_hazard(m, 1.0, 0.5) == doctest::Approx(1.5));
  CHECK(conditional_log_survival(m, 1.0, 1.0) == doctest::Approx(-2.0));
  CHECK(conditional_survival(m, 1.0, 1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(conditional_density(m, 1.0, 1.0) ==
        doctest::Approx(2.0 * std::exp(-2.0)));

  auto b = make_inverse_time_model();
  CHECK(conditional_hazard(b, 1.0, 1.0) == doctest::Approx(1.5));

  CHECK_THROWS_AS(conditional_hazard(m, -1.0, 0.5), DomainError);
  CHECK_THROWS_AS(conditional_hazard(m, 1.0, -0.5), DomainError);

  // discrete covariate: z must be an atom
  EahmModel dm(BaselineModel::exponential(1.0),
               CovariateEffect::separable(CovariateEffect::Psi::One),
               CovariateDistribution::discrete({0.5, 1.0, 2.0}, {0.3, 0.4, 0.3}));
  CHECK(conditional_hazard(dm, 0.0, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(conditional_hazard(dm, 0.0, 0.7), DomainError);
}

TEST_CASE("overall quantities match closed forms") {
  auto m = make_constant_effect_model();
  CHECK(overall_survival(m, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(overall_survival(m, 1.0) ==
        doctest::Approx(0.18393972058572116080).epsilon(1e-10));
  CHECK(overall_density(m, 0.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(overall_density(m, 1.0) ==
        doctest::Approx(0.27590958087858174120).epsilon(1e-9));
  CHECK(overall_hazard(m, 1.0) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(overall_hazard(m, 0.0) == doctest::Approx(2.0).epsilon(1e-9));

  auto b = make_inverse_time_model();
  CHECK(overall_survival(b, 1.0) ==
        doctest::Approx(0.21727552418082160523).epsilon(1e-10));
  // the mixture factor alone: E[e^{-w(1,Z)}] = 1/(1 + ln 2)
  CHECK(overall_survival(b, 1.0) * std::exp(1.0) ==
        doctest::Approx(0.59061610914964124974).epsilon(1e-10));

  // the two density routes agree far below the identity tolerance
  for (double x : {0.0, 0.5, 1.0, 3.0}) {
    CHECK(overall_density(b, x) ==
          doctest::Approx(overall_density_split(b, x)).epsilon(1e-10));
  }

  // discrete mixture: overall survival is the exact finite mixture
  EahmModel dm(BaselineModel::exponential(1.0),
               CovariateEffect::separable(CovariateEffect::Psi::One),
               CovariateDistribution::discrete({0.5, 2.0}, {0.25, 0.75}));
  double expected = 0.25 * std::exp(-1.5) + 0.75 * std::exp(-3.0);
  CHECK(overall_survival(dm, 1.0) * std::exp(0.0) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("model properness validation") {
  // bounded total hazard: Gompertz with negative shape plateaus at 2 and
  // the exp-decay effect adds at most z; mass escapes to infinity
  CHECK_THROWS_AS(
      EahmModel(BaselineModel::gompertz(1.0, -0.5),
                CovariateEffect::separable(CovariateEffect::Psi::ExpDecay, 1.0),
                CovariateDistribution::exponential(1.0)),
      ConfigError);

  // the same baseline with an unbounded effect is fine
  EahmModel ok(BaselineModel::gompertz(1.0, -0.5),
               CovariateEffect::separable(CovariateEffect::Psi::One),
               CovariateDistribution::exponential(1.0));
  CHECK(ok.effect_cumulative_unbounded());

  EahmModel bounded_effect(
      BaselineModel::linear_hazard(0.5, 0.2),
      CovariateEffect::separable(CovariateEffect::Psi::ExpDecay, 1.0),
      CovariateDistribution::exponential(1.0));
  CHECK_FALSE(bounded_effect.effect_cumulative_unbounded());
}

TEST_CASE("posterior covariate reweighting") {
  auto m = make_constant_effect_model();
  // at age 0 the weight is h*(0|v) = 1 + v, so the density is (1+v)e^{-v}/2
  CHECK(posterior_weight_density(m, 0.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-9));
  CHECK(posterior_weight_density(m, 0.0, 1.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  // integrates to one over the support
  QuadratureSpec spec;
  auto total = integrate_1d(
      [&](double v) { return posterior_weight_density(m, 0.7, v); }, 0.0,
      m.covariate().quantile(spec.tail_quantile), spec);
  CHECK(total.converged);
  CHECK(total.value == doctest::Approx(1.0).epsilon(1e-7));

  CHECK(posterior_expectation(m, 0.3, [](double) { return 1.0; }) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // single-atom covariate: point mass stays a point mass at every age
  EahmModel deg(BaselineModel::exponential(1.0),
                CovariateEffect::separable(CovariateEffect::Psi::One),
                CovariateDistribution::discrete({0.7}, {1.0}));
  CHECK(posterior_weight_density(deg, 1.3, 0.7) == doctest::Approx(1.0));
}

TEST_CASE("phi ratio") {
  auto m = make_constant_effect_model();
  CHECK(phi_ratio(m, 0.0, 0.8, 0.3) == doctest::Approx(1.0));
  // a(x,z) = z makes phi = e^{-x v} independent of theta
  CHECK(phi_ratio(m, 1.0, 0.0, 1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(phi_ratio(m, 1.0, 2.5, 1.0) == doctest::Approx(std::exp(-1.0)));

  // with a == 0, phi reduces to the baseline hazard ratio
  EahmModel plain(BaselineModel::weibull(2.0, 1.0), CovariateEffect::zero(),
                  CovariateDistribution::exponential(1.0));
  CHECK(phi_ratio(plain, 1.0, 1.0, 0.4) == doctest::Approx(2.0));  // h(2)/h(1)
}

TEST_CASE("residual ratio factorization prefers the corrected weight") {
  auto m = make_constant_effect_model();
  const double theta = 1.0, x = 1.0;
  double lhs = overall_density(m, x + theta) / overall_density(m, theta);
  double srat = m.baseline().survival(x + theta) / m.baseline().survival(theta);

  auto expect_phi = [&](WeightKind kind) {
    return posterior_expectation(
        m, theta, [&](double v) { return phi_ratio(m, x, theta, v); }, {},
        kind);
  };
  double corrected = srat * expect_phi(WeightKind::Corrected);
  double as_printed = srat * expect_phi(WeightKind::AsPrinted);
  CHECK(std::fabs(lhs - corrected) < 1e-8);
  CHECK(std::fabs(lhs - as_printed) > 1e-3);  // the dropped factor matters
}

TEST_CASE("lifetime sampling") {
  auto m = make_constant_effect_model();
  CHECK_THROWS_AS(sample_lifetimes(m, 1, 0), ConfigError);

  auto a = sample_lifetimes(m, 31, 100);
  auto b = sample_lifetimes(m, 31, 100);
  CHECK(a == b);  // deterministic in seed

  // degenerate covariate at 0: the draw must invert S(x) = u exactly
  EahmModel deg(BaselineModel::exponential(1.0),
                CovariateEffect::separable(CovariateEffect::Psi::One),
                CovariateDistribution::discrete({0.0}, {1.0}));
  const std::uint64_t seed = 11;
  auto one = sample_lifetimes(deg, seed, 1);
  Rng replay(seed);
  (void)replay.uniform01();             // consumed by the covariate draw
  double u = replay.uniform01();        // consumed by the lifetime draw
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(-std::log(u)).epsilon(1e-10));

  // sample mean of the mixture model approaches the closed-form mean
  auto big = sample_lifetimes(m, 202, 200000);
  double mean = std::accumulate(big.begin(), big.end(), 0.0) / big.size();
  CHECK(std::fabs(mean - 0.596347) < 0.01);
}
