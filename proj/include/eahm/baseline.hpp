#pragma once

#include <string>
#include <vector>

namespace eahm {

// Baseline lifetime model, specified through its hazard function h and the
// cumulative hazard H (closed form for every family).  All families satisfy
// h(x) >= 0 on [0, inf); factories reject parameters that would break that.
class BaselineModel {
public:
  enum class Family {
    Exponential,       // h = rate
    Weibull,           // h = (shape/scale) * (x/scale)^(shape-1)
    Gompertz,          // h = level * exp(shape * x); shape < 0 gives DFR
    LinearHazard,      // h = intercept + slope * x, slope >= 0
    PiecewiseConstant  // right-continuous step hazard
  };

  static BaselineModel exponential(double rate);
  static BaselineModel weibull(double shape, double scale);
  static BaselineModel gompertz(double level, double shape);
  static BaselineModel linear_hazard(double intercept, double slope);
  // rates has one more entry than breaks; rates[i] applies on
  // [breaks[i-1], breaks[i]) with breaks[-1] = 0 and breaks[m] = inf.
  static BaselineModel piecewise_constant(std::vector<double> breaks,
                                          std::vector<double> rates);

  double hazard(double x) const;
  double cumulative_hazard(double x) const;
  double survival(double x) const;
  double density(double x) const;

  Family family() const { return family_; }
  // Points where the hazard jumps (empty for the smooth families); density
  // identities that difference the survival curve must avoid these.
  const std::vector<double>& hazard_discontinuities() const { return breaks_; }
  // Piecewise-family accessors (throw for other families).
  const std::vector<double>& piecewise_breaks() const;
  const std::vector<double>& piecewise_rates() const;

  // Named parameters in declaration order, for echoing into documents.
  std::vector<std::pair<std::string, double>> parameters() const;

private:
  BaselineModel(Family f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}

  Family family_;
  double p1_ = 0.0;
  double p2_ = 0.0;
  std::vector<double> breaks_;
  std::vector<double> rates_;
};

}  // namespace eahm
