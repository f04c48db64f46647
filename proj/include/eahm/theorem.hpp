#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eahm/analyzers.hpp"
#include "eahm/model.hpp"
#include "eahm/scenario.hpp"

namespace eahm {

// Outcome of checking the DFR-to-DLR preservation statement on a model.
enum class PreservationStatus {
  ConclusionHolds,   // all hypotheses hold and the conclusion holds
  HypothesisFails,   // at least one hypothesis fails (conclusion reported anyway)
  Anomaly,           // hypotheses hold decisively, conclusion fails decisively
  Inconclusive       // some verdict is within 10x of the sign slack
};

const char* to_string(PreservationStatus s);

struct HypothesisEntry {
  std::string name;
  bool holds = false;
  double margin = 0.0;
  std::string summary;
};

struct PreservationReport {
  // Hypotheses, in order:
  //  [0] baseline hazard nonincreasing (the baseline is DFR)
  //  [1] effect nonincreasing in x for every covariate value
  //  [2] effect monotone in z (direction recorded below)
  //  [3] conditional hazard sign-regular, paired to the direction of [2]
  //  [4] conditional hazard log-convex in x for every covariate value
  std::array<HypothesisEntry, 5> hypotheses;
  HypothesisEntry conclusion;  // overall density log-convex (X* is DLR)
  PreservationStatus status = PreservationStatus::Inconclusive;
  std::vector<int> failed_hypotheses;  // 1-based indices of failures

  MonotonicityVerdict baseline_hazard;
  EffectMonotonicity effect_monotonicity;
  Direction effect_z_direction = Direction::Constant;
  Tp2Class sign_regularity_required = Tp2Class::Both;  // Both = either accepted
  Tp2Verdict conditional_hazard_sign;
  SliceVerdicts conditional_log_convexity;
  MonotonicityVerdict conclusion_curvature;

  bool regridded = false;  // true when an anomaly triggered re-verification
  std::vector<double> x_grid_points;  // grids actually used (after any refine)
  std::vector<double> z_grid_points;
  std::vector<double> overall_density_curve;  // f* on x_grid_points
};

// Check every hypothesis of the preservation statement and its conclusion
// on the given grids.  An apparent anomaly (decisive hypotheses, decisively
// failing conclusion) is re-checked once on midpoint-refined grids before
// it is reported.
PreservationReport verify_dfr_to_dlr(const EahmModel& m, const Grid& x_grid,
                                     const Grid& z_grid,
                                     const ToleranceProfile& tol = {},
                                     const QuadratureSpec& spec = {});

// ---- expectation-monotonicity lemma ---------------------------------------

struct ExpectationMonotonicityReport {
  MonotonicityVerdict expectation;        // theta -> E_theta[phi(theta, V)]
  std::vector<double> expectation_values;
  Direction family_st_direction = Direction::Constant;
  MonotonicityVerdict phi_in_v;     // aggregated over theta slices
  MonotonicityVerdict phi_in_theta; // aggregated over v slices
  int pattern = 0;            // 1 or 2; 0 when neither premise set matches
  bool premises_hold = false;
  bool conclusion_matches = false;
  bool anomaly = false;
};

// Checks the two monotone-expectation patterns on a parametric family
// G_theta of covariate laws and a kernel phi(theta, v):
//  pattern 1: family ST-increasing and phi decreasing in v (or both
//             reversed), phi decreasing in theta  => expectation decreasing;
//  pattern 2: the same with the v-monotonicity aligned instead of opposed,
//             phi increasing in theta             => expectation increasing.
ExpectationMonotonicityReport verify_expectation_monotonicity(
    const std::function<CovariateDistribution(double)>& family,
    const std::function<double(double, double)>& phi, const Grid& theta_grid,
    const Grid& v_grid, const ToleranceProfile& tol = {},
    const QuadratureSpec& spec = {});

// ---- internal-consistency checks -------------------------------------------

struct DensityIdentityReport {
  double max_representation_gap = 0.0;  // two mixture routes to f*
  double max_derivative_gap = 0.0;      // f* vs -dS*/dx (central differences)
  double representation_tol = 0.0;
  double derivative_tol = 0.0;
  std::size_t skipped_points = 0;  // near baseline hazard discontinuities
  bool pass = false;
};

DensityIdentityReport verify_density_identity(const EahmModel& m,
                                              const Grid& x_grid,
                                              const QuadratureSpec& spec = {},
                                              double representation_tol = 1e-8,
                                              double derivative_tol = 1e-4);

struct WIdentitySample {
  double x = 0.0, theta = 0.0, z = 0.0;
};

std::vector<WIdentitySample> make_w_identity_samples(const EahmModel& m,
                                                     std::uint64_t seed,
                                                     std::size_t n);

// Max over samples of |[w(theta,z) - w(x+theta,z)] + integral of
// a(t+theta, z) over t in [0, x]| -- the shift identity behind the residual
// ratio factorization.  The integral is always done numerically here so the
// check is independent of closed-form cumulatives.
double verify_w_identity(const CovariateEffect& effect,
                         std::span<const WIdentitySample> samples,
                         const QuadratureSpec& spec = {});

struct RatioDlrReport {
  std::vector<double> x_values;
  std::vector<MonotonicityVerdict> ratio_verdicts;  // one per x value
  MonotonicityVerdict dlr_verdict;  // curvature of the log density on the theta grid
  bool consistent = false;  // all ratios weakly increasing <=> DLR verdict
  double max_factorization_gap = 0.0;  // ratio vs survival-ratio * E[phi]
  double factorization_tol = 0.0;
  std::size_t excluded_thetas = 0;     // density below exclusion_threshold
  double exclusion_threshold = 1e-300;
};

// Residual-ratio route to DLR: for each x, theta -> f*(x+theta)/f*(theta)
// must be nondecreasing exactly when the overall density is log-convex, and
// each ratio must factor into the baseline survival ratio times the
// posterior expectation of phi.
RatioDlrReport verify_ratio_dlr_equivalence(const EahmModel& m,
                                            std::span<const double> x_values,
                                            const Grid& theta_grid,
                                            const ToleranceProfile& tol = {},
                                            const QuadratureSpec& spec = {},
                                            double factorization_tol = 1e-6);

struct SamplingReport {
  std::size_t n = 0;
  double alpha = 0.0;
  double sup_distance = 0.0;
  double dkw_bound = 0.0;
  bool pass = false;
};

// Kolmogorov-style comparison of the empirical survival of n seeded draws
// against the quadrature overall survival on eval_grid; the bound is the
// DKW envelope sqrt(log(2/alpha) / (2n)).  Requires n >= 1000.
SamplingReport verify_sampling_consistency(const EahmModel& m,
                                           std::uint64_t seed, std::size_t n,
                                           double alpha, const Grid& eval_grid,
                                           const QuadratureSpec& spec = {});

// ---- counterexample search --------------------------------------------------

struct SearchOutcome {
  bool found = false;
  std::size_t evaluated = 0;          // candidates actually verified
  std::size_t invalid_candidates = 0; // rejected while building/verifying
  std::optional<Scenario> scenario;
  std::optional<PreservationReport> report;
};

// Seeded random search over the ranges in scenario.search: each candidate
// perturbs the base scenario document, re-validates it through the parser,
// runs verify_dfr_to_dlr, and stops at the first candidate matching the
// target.  Deterministic in the scenario seed.
SearchOutcome search_counterexample(const Scenario& base);

}  // namespace eahm
