// Acceptance gate: runs the seven release criteria end to end against the
// shipped scenario corpus and the CLI binary, printing one PASS/FAIL line
// per criterion.  Exit code = number of failed criteria.
//
// Usage: acceptance <path-to-cli> <scenarios-dir> <work-dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eahm/analyzers.hpp"
#include "eahm/model.hpp"
#include "eahm/scenario.hpp"
#include "eahm/theorem.hpp"

using namespace eahm;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Criterion {
  int number = 0;
  bool pass = true;
  std::vector<std::string> problems;
  std::string note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      problems.push_back(what);
    }
  }
};

class Timer {
public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point t0_;
};

std::string cli_path;
fs::path scenarios_dir;
fs::path work_dir;

const std::vector<std::string> kScenarioFiles = {
    "ahm_exponential.json",    "eahm_inverse_time.json",
    "weibull_ifr_control.json", "exp_decay_gamma.json",
    "discrete_mixture.json",   "uniform_affine.json",
    "gompertz_tp2_mismatch.json", "linear_ifr_control.json",
    "piecewise_step.json",     "weibull_search.json"};

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + cli_path + "\" " + args;
  int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -2;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::string("<unreadable:") + p.string() + ">";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

void report(const Criterion& c, const std::string& headline) {
  if (c.pass) {
    std::cout << "PASS criterion-" << c.number << " " << headline;
    if (!c.note.empty()) std::cout << " (" << c.note << ")";
    std::cout << "\n";
  } else {
    std::cout << "FAIL criterion-" << c.number << " " << headline;
    if (!c.note.empty()) std::cout << " (" << c.note << ")";
    std::cout << "\n";
    for (const auto& p : c.problems)
      std::cout << "     - " << p << "\n";
  }
  std::cout.flush();
}

// ---------------------------------------------------------------------------
// 1. Closed-form mixture scenario: quadrature curves within 1e-6 of the
//    closed forms on a 200-point grid over [0,10]; classifier says DFR + DLR;
//    under 5 seconds.
Criterion criterion1() {
  Criterion c;
  c.number = 1;
  Timer t;

  EahmModel m(BaselineModel::exponential(1.0),
              CovariateEffect::separable(CovariateEffect::Psi::One),
              CovariateDistribution::exponential(1.0));
  Grid g = Grid::linspace(0.0, 10.0, 200);
  double max_s = 0.0, max_f = 0.0, max_h = 0.0;
  std::vector<double> h_star(g.size()), f_star(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g[i];
    const double s_ref = std::exp(-x) / (1.0 + x);
    const double f_ref = std::exp(-x) * (x + 2.0) / ((1.0 + x) * (1.0 + x));
    const double h_ref = 1.0 + 1.0 / (1.0 + x);
    const double s = overall_survival(m, x);
    f_star[i] = overall_density(m, x);
    h_star[i] = overall_hazard(m, x);
    max_s = std::max(max_s, std::fabs(s - s_ref));
    max_f = std::max(max_f, std::fabs(f_star[i] - f_ref));
    max_h = std::max(max_h, std::fabs(h_star[i] - h_ref));
  }
  c.require(max_s < 1e-6, "S* gap " + fmt(max_s) + " exceeds 1e-6");
  c.require(max_f < 1e-6, "f* gap " + fmt(max_f) + " exceeds 1e-6");
  c.require(max_h < 1e-6, "h* gap " + fmt(max_h) + " exceeds 1e-6");

  auto hazard_class = check_ifr_dfr(h_star);
  c.require(hazard_class.direction == Direction::Decreasing,
            std::string("overall hazard classified ") +
                to_string(hazard_class.direction) + ", wanted decreasing");
  auto curv_class = check_ilr_dlr(f_star, g);
  c.require(curv_class.direction == Direction::Increasing,
            std::string("overall density curvature classified ") +
                to_string(curv_class.direction) + ", wanted increasing");

  const double secs = t.seconds();
  c.require(secs < 5.0, "runtime " + fmt(secs) + "s exceeds 5s");
  c.note = "max gaps S* " + fmt(max_s) + ", f* " + fmt(max_f) + ", h* " +
           fmt(max_h) + "; DFR and DLR; " + fmt(secs) + "s";
  return c;
}

// ---------------------------------------------------------------------------
// 2. Preservation verified end to end on the inverse-time scenario: all five
//    hypotheses hold, the sign-regularity check finds no positive adjacent
//    minor, the conclusion holds, and the status string is exact; under 10 s.
Criterion criterion2() {
  Criterion c;
  c.number = 2;
  Timer t;

  auto sc = load_scenario_file(scenarios_dir / "eahm_inverse_time.json");
  auto rep = verify_dfr_to_dlr(sc.model, sc.make_x_grid(), sc.make_z_grid(),
                               sc.tol_profile(), sc.quad_spec());
  for (std::size_t i = 0; i < rep.hypotheses.size(); ++i)
    c.require(rep.hypotheses[i].holds,
              "hypothesis " + std::to_string(i + 1) + " (" +
                  rep.hypotheses[i].name + ") failed");
  c.require(!rep.conditional_hazard_sign.positive.has_value(),
            "found an adjacent minor with positive log-determinant");
  c.require(rep.conditional_hazard_sign.classification == Tp2Class::Rr2 ||
                rep.conditional_hazard_sign.classification == Tp2Class::Both,
            "conditional hazard not reverse-rule-2 on the grid");
  c.require(rep.conclusion.holds, "conclusion (overall density log-convex) failed");
  c.require(rep.status == PreservationStatus::ConclusionHolds,
            std::string("status was ") + to_string(rep.status));
  c.require(std::string(to_string(rep.status)) ==
                "hypotheses-hold-conclusion-holds",
            "status string mismatch");

  const double secs = t.seconds();
  c.require(secs < 10.0, "runtime " + fmt(secs) + "s exceeds 10s");
  c.note = "all hypotheses hold, conclusion holds; " + fmt(secs) + "s";
  return c;
}

// ---------------------------------------------------------------------------
// 3. Negative control via the CLI: increasing-baseline scenario must exit 0,
//    report the first hypothesis failing with a witness pair, and report the
//    conclusion failing with a three-point curvature witness.
Criterion criterion3() {
  Criterion c;
  c.number = 3;

  const fs::path out = work_dir / "criterion3";
  fs::create_directories(out);
  int code = run_cli("verify --scenario \"" +
                     (scenarios_dir / "weibull_ifr_control.json").string() +
                     "\" --out \"" + out.string() + "\" --quiet");
  c.require(code == 0, "CLI exit code " + std::to_string(code) + ", wanted 0");
  if (!c.pass) return c;

  ordered_json v = ordered_json::parse(slurp(out / "verdict.json"));
  const ordered_json* h1 = nullptr;
  const ordered_json* conclusion = nullptr;
  const ordered_json* status = nullptr;
  for (const auto& chk : v.at("checks")) {
    if (chk.value("kind", "") == "hypothesis" && chk.value("index", 0) == 1)
      h1 = &chk;
    if (chk.value("kind", "") == "conclusion") conclusion = &chk;
    if (chk.value("name", "") == "preservation-status") status = &chk;
  }
  c.require(h1 != nullptr, "hypothesis 1 entry missing from verdict");
  c.require(conclusion != nullptr, "conclusion entry missing from verdict");
  c.require(status != nullptr, "preservation-status entry missing");
  if (!c.pass) return c;

  c.require(!h1->at("holds").get<bool>(), "hypothesis 1 unexpectedly holds");
  c.require(h1->at("detail").at("direction") == "increasing",
            "hypothesis 1 direction is not 'increasing'");
  c.require(!h1->at("detail").at("rise_witness").is_null(),
            "hypothesis 1 lacks a rising witness pair");
  c.require(!conclusion->at("holds").get<bool>(),
            "conclusion unexpectedly holds");
  const auto& fw = conclusion->at("detail").at("fall_witness");
  c.require(!fw.is_null(), "conclusion lacks a concavity witness");
  if (!fw.is_null())
    c.require(fw.at("j").get<std::size_t>() == fw.at("i").get<std::size_t>() + 2,
              "conclusion witness does not bracket a three-point stencil");
  c.require(status->at("status") == "hypothesis-fails",
            "status is not 'hypothesis-fails'");
  bool has1 = false;
  for (const auto& idx : status->at("failed_hypotheses"))
    if (idx.get<int>() == 1) has1 = true;
  c.require(has1, "failed hypothesis list does not include 1");

  c.note = "exit 0, H1 fails with witness pair, conclusion fails with stencil witness";
  return c;
}

// ---------------------------------------------------------------------------
// 4. Identity battery on every shipped scenario: two density routes agree,
//    density matches -dS*/dx, the cumulative-effect shift identity holds on
//    100 seeded samples, and the residual ratio factorizes; under 30 s total.
Criterion criterion4() {
  Criterion c;
  c.number = 4;
  Timer t;

  double worst_rep = 0.0, worst_deriv = 0.0, worst_w = 0.0, worst_ratio = 0.0;
  for (const auto& name : kScenarioFiles) {
    auto sc = load_scenario_file(scenarios_dir / name);
    const Grid xg = sc.make_x_grid();
    const QuadratureSpec spec = sc.quad_spec();

    auto ident = verify_density_identity(sc.model, xg, spec);
    worst_rep = std::max(worst_rep, ident.max_representation_gap);
    worst_deriv = std::max(worst_deriv, ident.max_derivative_gap);
    c.require(ident.max_representation_gap < 1e-8,
              name + ": density routes differ by " +
                  fmt(ident.max_representation_gap));
    c.require(ident.max_derivative_gap < 1e-4,
              name + ": density vs -dS*/dx differs by " +
                  fmt(ident.max_derivative_gap));

    auto samples = make_w_identity_samples(sc.model, sc.seed, 100);
    double wgap = verify_w_identity(sc.model.effect(), samples, spec);
    worst_w = std::max(worst_w, wgap);
    c.require(wgap < 1e-8, name + ": w-identity gap " + fmt(wgap));

    std::vector<double> xs{0.5, 1.0, 2.0};
    Grid thetas = Grid::linspace(0.0, 5.0, 26);
    auto ratio = verify_ratio_dlr_equivalence(sc.model, xs, thetas,
                                              sc.tol_profile(), spec);
    worst_ratio = std::max(worst_ratio, ratio.max_factorization_gap);
    c.require(ratio.max_factorization_gap < 1e-6,
              name + ": ratio factorization gap " +
                  fmt(ratio.max_factorization_gap));
  }

  const double secs = t.seconds();
  c.require(secs < 30.0, "runtime " + fmt(secs) + "s exceeds 30s");
  c.note = "10 scenarios; worst gaps: routes " + fmt(worst_rep) + ", deriv " +
           fmt(worst_deriv) + ", w " + fmt(worst_w) + ", ratio " +
           fmt(worst_ratio) + "; " + fmt(secs) + "s";
  return c;
}

// ---------------------------------------------------------------------------
// 5. Monte Carlo consistency: 200,000 seeded draws per scenario stay inside
//    the DKW envelope at alpha = 0.001; each scenario under 20 s.
Criterion criterion5() {
  Criterion c;
  c.number = 5;

  double worst = 0.0;
  double bound = 0.0;
  for (const auto& name : kScenarioFiles) {
    Timer t;
    auto sc = load_scenario_file(scenarios_dir / name);
    const GridSettings& gs = sc.x_grid;
    Grid eval = Grid::linspace(gs.start, gs.stop, 101);
    auto rep = verify_sampling_consistency(sc.model, sc.seed, 200000, 0.001,
                                           eval, sc.quad_spec());
    bound = rep.dkw_bound;
    worst = std::max(worst, rep.sup_distance);
    c.require(rep.pass, name + ": sup distance " + fmt(rep.sup_distance) +
                             " exceeds DKW bound " + fmt(rep.dkw_bound));
    const double secs = t.seconds();
    c.require(secs < 20.0,
              name + ": runtime " + fmt(secs) + "s exceeds 20s");
  }
  c.note = "n=200000 per scenario; worst sup distance " + fmt(worst) +
           " vs bound " + fmt(bound);
  return c;
}

// ---------------------------------------------------------------------------
// 6. Analyzer brute-force equivalence on small grids, plus the order-check
//    implication corpus (likelihood-ratio order implies the usual one).
Tp2Class brute_force_tp2(const std::function<double(double, double)>& fn,
                         const Grid& xg, const Grid& zg, double eps) {
  bool pos = false, neg = false;
  for (std::size_t i1 = 0; i1 < xg.size(); ++i1)
    for (std::size_t i2 = i1 + 1; i2 < xg.size(); ++i2)
      for (std::size_t j1 = 0; j1 < zg.size(); ++j1)
        for (std::size_t j2 = j1 + 1; j2 < zg.size(); ++j2) {
          const double d = std::log(fn(xg[i1], zg[j1])) +
                           std::log(fn(xg[i2], zg[j2])) -
                           std::log(fn(xg[i1], zg[j2])) -
                           std::log(fn(xg[i2], zg[j1]));
          if (d > eps) pos = true;
          if (d < -eps) neg = true;
        }
  if (pos && neg) return Tp2Class::Neither;
  if (pos) return Tp2Class::Tp2;
  if (neg) return Tp2Class::Rr2;
  return Tp2Class::Both;
}

Criterion criterion6() {
  Criterion c;
  c.number = 6;
  const ToleranceProfile tol;

  struct Kernel {
    std::string name;
    std::function<double(double, double)> fn;
    Grid xg;
    Grid zg;
  };
  std::vector<Kernel> kernels;
  kernels.push_back({"exp(xz)",
                     [](double x, double z) { return std::exp(x * z); },
                     Grid::linspace(0.0, 2.0, 5),
                     Grid(std::vector<double>{0.0, 0.3, 0.9, 2.0})});
  kernels.push_back({"exp(-xz)",
                     [](double x, double z) { return std::exp(-x * z); },
                     Grid::linspace(0.0, 2.0, 5), Grid::linspace(0.0, 1.5, 5)});
  kernels.push_back({"1 + z exp(-x)",
                     [](double x, double z) { return 1.0 + z * std::exp(-x); },
                     Grid::linspace(0.0, 3.0, 6), Grid::linspace(0.1, 2.1, 6)});
  kernels.push_back({"separable (1+x)(2+z)",
                     [](double x, double z) { return (1.0 + x) * (2.0 + z); },
                     Grid::linspace(0.0, 2.0, 5), Grid::linspace(0.0, 2.0, 4)});
  kernels.push_back(
      {"bump (x-1)^2 (z-1)^2 + 1",
       [](double x, double z) {
         return 1.0 + (x - 1.0) * (x - 1.0) * (z - 1.0) * (z - 1.0);
       },
       Grid(std::vector<double>{0.0, 1.0, 2.0}),
       Grid(std::vector<double>{0.0, 1.0, 2.0})});

  // the conditional hazard of every shipped scenario on a small subgrid
  for (const auto& name : kScenarioFiles) {
    auto sc = std::make_shared<Scenario>(load_scenario_file(scenarios_dir / name));
    const CovariateDistribution& cov = sc->model.covariate();
    Grid zg =
        cov.is_discrete()
            ? Grid(cov.atoms())
            : Grid(std::vector<double>{cov.quantile(0.05), cov.quantile(0.275),
                                       cov.quantile(0.5), cov.quantile(0.725),
                                       cov.quantile(0.95)});
    kernels.push_back({name + " conditional hazard",
                       [sc](double x, double z) {
                         return sc->model.baseline().hazard(x) +
                                sc->model.effect().value(x, z);
                       },
                       Grid::linspace(0.05, 3.05, 6), zg});
  }

  int checked = 0;
  for (const auto& k : kernels) {
    auto fast = check_tp2_rr2(k.fn, k.xg, k.zg, tol);
    auto brute = brute_force_tp2(k.fn, k.xg, k.zg, tol.sign_slack);
    c.require(fast.classification == brute,
              k.name + ": adjacent-minor class " +
                  to_string(fast.classification) + " != brute-force class " +
                  to_string(brute));
    ++checked;
  }

  // order-implication corpus: whenever the likelihood-ratio order is
  // decisive, the usual stochastic order must agree in direction.  The grid
  // starts off zero so reference densities that vanish at the origin (the
  // gamma below) stay strictly positive.
  Grid og = Grid::linspace(0.25, 8.0, 32);
  struct OrderPair {
    std::string name;
    std::function<double(double)> fx, fy, sx, sy;
  };
  std::vector<OrderPair> pairs;
  pairs.push_back({"exp(1) vs exp(1/2)",
                   [](double x) { return std::exp(-x); },
                   [](double x) { return 0.5 * std::exp(-0.5 * x); },
                   [](double x) { return std::exp(-x); },
                   [](double x) { return std::exp(-0.5 * x); }});
  pairs.push_back({"mixture vs its baseline",
                   [](double x) {
                     return std::exp(-x) * (x + 2.0) / ((1.0 + x) * (1.0 + x));
                   },
                   [](double x) { return std::exp(-x); },
                   [](double x) { return std::exp(-x) / (1.0 + x); },
                   [](double x) { return std::exp(-x); }});
  pairs.push_back({"exp(1) vs gamma(2,1)",
                   [](double x) { return std::exp(-x); },
                   [](double x) { return x * std::exp(-x); },
                   [](double x) { return std::exp(-x); },
                   [](double x) { return (1.0 + x) * std::exp(-x); }});
  pairs.push_back({"identical laws",
                   [](double x) { return std::exp(-x); },
                   [](double x) { return std::exp(-x); },
                   [](double x) { return std::exp(-x); },
                   [](double x) { return std::exp(-x); }});
  // plus every pair reversed
  const std::size_t fixed = pairs.size();
  for (std::size_t i = 0; i < fixed; ++i) {
    OrderPair rev = pairs[i];
    std::swap(rev.fx, rev.fy);
    std::swap(rev.sx, rev.sy);
    rev.name += " (reversed)";
    pairs.push_back(rev);
  }

  int decisive = 0;
  for (const auto& p : pairs) {
    std::vector<double> fx, fy, sx, sy;
    for (std::size_t i = 0; i < og.size(); ++i) {
      fx.push_back(p.fx(og[i]));
      fy.push_back(p.fy(og[i]));
      sx.push_back(p.sx(og[i]));
      sy.push_back(p.sy(og[i]));
    }
    auto lr = check_lr_order(fx, fy, tol);
    auto st = check_st_order(sx, sy, tol);
    if (lr.relation == OrderRelation::Holds) {
      ++decisive;
      c.require(st.relation == OrderRelation::Holds ||
                    st.relation == OrderRelation::Equal,
                p.name + ": LR holds but ST is " + to_string(st.relation));
    } else if (lr.relation == OrderRelation::Reversed) {
      ++decisive;
      c.require(st.relation == OrderRelation::Reversed ||
                    st.relation == OrderRelation::Equal,
                p.name + ": LR reversed but ST is " + to_string(st.relation));
    }
  }
  c.require(decisive >= 6, "order corpus produced too few decisive cases");

  c.note = std::to_string(checked) + " kernels brute-forced; " +
           std::to_string(decisive) + " decisive order pairs";
  return c;
}

// ---------------------------------------------------------------------------
// 7. Determinism: run the full CLI corpus twice into separate directories
//    and require byte-identical outputs everywhere.
Criterion criterion7() {
  Criterion c;
  c.number = 7;

  auto run_corpus = [&](const fs::path& root) -> bool {
    for (const auto& name : kScenarioFiles) {
      const std::string stem = fs::path(name).stem().string();
      std::vector<std::string> commands{"eval", "classify", "verify", "sample"};
      if (stem == "weibull_search") commands.push_back("search");
      for (const auto& cmd : commands) {
        const fs::path out = root / stem / cmd;
        fs::create_directories(out);
        int code = run_cli(cmd + " --scenario \"" +
                           (scenarios_dir / name).string() + "\" --out \"" +
                           out.string() + "\" --quiet");
        if (code != 0) {
          c.require(false, stem + " " + cmd + ": exit code " +
                               std::to_string(code));
          return false;
        }
      }
    }
    return true;
  };

  const fs::path run_a = work_dir / "determinism_a";
  const fs::path run_b = work_dir / "determinism_b";
  fs::remove_all(run_a);
  fs::remove_all(run_b);
  if (!run_corpus(run_a) || !run_corpus(run_b)) return c;

  std::size_t compared = 0;
  for (auto it = fs::recursive_directory_iterator(run_a);
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    const fs::path rel = fs::relative(it->path(), run_a);
    const fs::path twin = run_b / rel;
    if (!fs::exists(twin)) {
      c.require(false, rel.string() + " missing from the second run");
      continue;
    }
    if (slurp(it->path()) != slurp(twin))
      c.require(false, rel.string() + " differs between runs");
    ++compared;
  }
  c.require(compared >= kScenarioFiles.size() * 4,
            "unexpectedly few output files compared");

  c.note = std::to_string(compared) + " files byte-compared across two runs";
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: acceptance <cli-binary> <scenarios-dir> <work-dir>\n";
    return 64;
  }
  cli_path = argv[1];
  scenarios_dir = argv[2];
  work_dir = argv[3];
  fs::create_directories(work_dir);

  int failures = 0;
  std::vector<std::pair<std::function<Criterion()>, std::string>> table = {
      {criterion1, "closed-form curves and aging classes"},
      {criterion2, "preservation verified on the inverse-time scenario"},
      {criterion3, "negative control through the CLI"},
      {criterion4, "identity battery on the shipped corpus"},
      {criterion5, "Monte Carlo consistency under the DKW bound"},
      {criterion6, "brute-force analyzer equivalence and order implications"},
      {criterion7, "byte-identical repeated CLI corpus runs"},
  };
  for (std::size_t k = 0; k < table.size(); ++k) {
    Criterion crit;
    try {
      crit = table[k].first();
    } catch (const std::exception& e) {
      crit.number = static_cast<int>(k) + 1;
      crit.pass = false;
      crit.problems.push_back(std::string("exception: ") + e.what());
    }
    if (!crit.pass) ++failures;
    report(crit, table[k].second);
  }
  if (failures == 0)
    std::cout << "acceptance: all 7 criteria passed\n";
  else
    std::cout << "acceptance: " << failures << " criteria FAILED\n";
  return failures;
}
