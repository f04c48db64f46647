#include "eahm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "eahm/errors.hpp"

namespace eahm {
namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

const json& require_key(const json& obj, const std::string& key,
                        const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("missing required key '" + key + "' in " + where);
  return *it;
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require_key(obj, key, where);
  if (!v.is_number())
    throw ConfigError("key '" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& key,
                     const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj, key, where);
}

std::uint64_t get_uint_or(const json& obj, const std::string& key,
                          const std::string& where, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  // accept any integral JSON number with a nonnegative value (the parser
  // yields unsigned for literals, but documents built in code may carry
  // signed integers)
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("key '" + key + "' in " + where +
                    " must be a nonnegative integer");
}

std::string get_string(const json& obj, const std::string& key,
                       const std::string& where) {
  const json& v = require_key(obj, key, where);
  if (!v.is_string())
    throw ConfigError("key '" + key + "' in " + where + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_number_array(const json& obj, const std::string& key,
                                     const std::string& where) {
  const json& v = require_key(obj, key, where);
  if (!v.is_array())
    throw ConfigError("key '" + key + "' in " + where + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError("array '" + key + "' in " + where +
                        " must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

BaselineModel parse_baseline(const json& obj) {
  const std::string where = "baseline";
  const std::string family = get_string(obj, "family", where);
  if (family == "exponential") {
    check_keys(obj, {"family", "rate"}, where);
    return BaselineModel::exponential(get_number(obj, "rate", where));
  }
  if (family == "weibull") {
    check_keys(obj, {"family", "shape", "scale"}, where);
    return BaselineModel::weibull(get_number(obj, "shape", where),
                                  get_number(obj, "scale", where));
  }
  if (family == "gompertz") {
    check_keys(obj, {"family", "level", "shape"}, where);
    return BaselineModel::gompertz(get_number(obj, "level", where),
                                   get_number(obj, "shape", where));
  }
  if (family == "linear") {
    check_keys(obj, {"family", "intercept", "slope"}, where);
    return BaselineModel::linear_hazard(get_number(obj, "intercept", where),
                                        get_number(obj, "slope", where));
  }
  if (family == "piecewise") {
    check_keys(obj, {"family", "breaks", "rates"}, where);
    return BaselineModel::piecewise_constant(get_number_array(obj, "breaks", where),
                                             get_number_array(obj, "rates", where));
  }
  throw ConfigError("unknown baseline family '" + family + "'");
}

CovariateEffect::Psi parse_psi(const std::string& s) {
  if (s == "one") return CovariateEffect::Psi::One;
  if (s == "exp_decay") return CovariateEffect::Psi::ExpDecay;
  if (s == "inverse_time") return CovariateEffect::Psi::InverseTime;
  throw ConfigError("unknown effect psi '" + s +
                    "' (expected one | exp_decay | inverse_time)");
}

double parse_beta(const json& obj, CovariateEffect::Psi psi, const std::string& where) {
  if (psi != CovariateEffect::Psi::ExpDecay) {
    if (obj.contains("beta"))
      throw ConfigError("key 'beta' in " + where +
                        " is only valid with psi = 'exp_decay'");
    return 1.0;
  }
  return get_number_or(obj, "beta", where, 1.0);
}

CovariateEffect parse_effect(const json& obj) {
  const std::string where = "effect";
  const std::string family = get_string(obj, "family", where);
  if (family == "constant") {
    check_keys(obj, {"family", "intercept", "slope"}, where);
    return CovariateEffect::constant_in_time(
        get_number_or(obj, "intercept", where, 0.0),
        get_number(obj, "slope", where));
  }
  if (family == "separable") {
    check_keys(obj, {"family", "psi", "beta"}, where);
    const auto psi = parse_psi(get_string(obj, "psi", where));
    return CovariateEffect::separable(psi, parse_beta(obj, psi, where));
  }
  if (family == "affine") {
    check_keys(obj, {"family", "intercept", "slope", "psi", "beta"}, where);
    const auto psi = parse_psi(get_string(obj, "psi", where));
    return CovariateEffect::affine(get_number(obj, "intercept", where),
                                   get_number(obj, "slope", where), psi,
                                   parse_beta(obj, psi, where));
  }
  throw ConfigError("unknown effect family '" + family + "'");
}

CovariateDistribution parse_covariate(const json& obj) {
  const std::string where = "covariate";
  const std::string family = get_string(obj, "family", where);
  if (family == "exponential") {
    check_keys(obj, {"family", "rate"}, where);
    return CovariateDistribution::exponential(get_number(obj, "rate", where));
  }
  if (family == "gamma") {
    check_keys(obj, {"family", "shape", "rate"}, where);
    return CovariateDistribution::gamma(get_number(obj, "shape", where),
                                        get_number(obj, "rate", where));
  }
  if (family == "uniform") {
    check_keys(obj, {"family", "lo", "hi"}, where);
    return CovariateDistribution::uniform(get_number(obj, "lo", where),
                                          get_number(obj, "hi", where));
  }
  if (family == "discrete") {
    check_keys(obj, {"family", "atoms", "probs"}, where);
    return CovariateDistribution::discrete(get_number_array(obj, "atoms", where),
                                           get_number_array(obj, "probs", where));
  }
  throw ConfigError("unknown covariate family '" + family + "'");
}

GridSettings parse_grid(const json& obj, const std::string& where,
                        const GridSettings& defaults) {
  check_keys(obj, {"start", "stop", "points", "spacing"}, where);
  GridSettings g = defaults;
  g.start = get_number_or(obj, "start", where, defaults.start);
  g.stop = get_number_or(obj, "stop", where, defaults.stop);
  g.points = static_cast<std::size_t>(
      get_uint_or(obj, "points", where, defaults.points));
  if (obj.contains("spacing")) {
    const std::string s = get_string(obj, "spacing", where);
    if (s == "linear") g.log_spacing = false;
    else if (s == "log") g.log_spacing = true;
    else throw ConfigError("grid spacing must be 'linear' or 'log' in " + where);
  }
  if (g.points < 3)
    throw ConfigError(where + " needs at least 3 points");
  if (!(g.stop > g.start))
    throw ConfigError(where + " needs stop > start");
  if (g.start < 0.0) throw ConfigError(where + " needs start >= 0");
  if (g.log_spacing && !(g.start > 0.0))
    throw ConfigError(where + " needs start > 0 for log spacing");
  return g;
}

GridSettings default_z_grid(const CovariateDistribution& cov) {
  GridSettings g;
  g.start = cov.quantile(0.005);
  g.stop = cov.quantile(0.995);
  g.points = 21;
  g.log_spacing = false;
  if (!(g.stop > g.start))
    throw ConfigError("covariate distribution is too degenerate for a z grid");
  return g;
}

ToleranceSettings parse_tolerances(const json& obj) {
  const std::string where = "tolerances";
  check_keys(obj,
             {"sign_slack", "quad_abs_tol", "quad_rel_tol",
              "quad_max_subdivisions", "tail_quantile", "root_tol"},
             where);
  ToleranceSettings t;
  t.sign_slack = get_number_or(obj, "sign_slack", where, t.sign_slack);
  t.quad_abs_tol = get_number_or(obj, "quad_abs_tol", where, t.quad_abs_tol);
  t.quad_rel_tol = get_number_or(obj, "quad_rel_tol", where, t.quad_rel_tol);
  t.quad_max_subdivisions = static_cast<std::size_t>(get_uint_or(
      obj, "quad_max_subdivisions", where, t.quad_max_subdivisions));
  t.tail_quantile = get_number_or(obj, "tail_quantile", where, t.tail_quantile);
  t.root_tol = get_number_or(obj, "root_tol", where, t.root_tol);
  if (!(t.sign_slack > 0.0)) throw ConfigError("sign_slack must be > 0");
  if (!(t.quad_abs_tol > 0.0)) throw ConfigError("quad_abs_tol must be > 0");
  if (!(t.quad_rel_tol > 0.0)) throw ConfigError("quad_rel_tol must be > 0");
  if (!(t.tail_quantile > 0.0 && t.tail_quantile < 1.0))
    throw ConfigError("tail_quantile must lie in (0, 1)");
  if (!(t.root_tol > 0.0)) throw ConfigError("root_tol must be > 0");
  return t;
}

SampleSettings parse_sample(const json& obj) {
  const std::string where = "sample";
  check_keys(obj, {"count", "alpha"}, where);
  SampleSettings s;
  s.count = static_cast<std::size_t>(get_uint_or(obj, "count", where, s.count));
  s.alpha = get_number_or(obj, "alpha", where, s.alpha);
  if (s.count == 0) throw ConfigError("sample count must be >= 1");
  if (!(s.alpha > 0.0 && s.alpha < 1.0))
    throw ConfigError("sample alpha must lie in (0, 1)");
  return s;
}

SearchSettings parse_search(const json& obj) {
  const std::string where = "search";
  check_keys(obj, {"target", "hypothesis", "budget", "ranges"}, where);
  SearchSettings s;
  s.target = get_string(obj, "target", where);
  if (s.target != "conclusion-fails" && s.target != "hypothesis-fails" &&
      s.target != "hypothesis-fails-and-conclusion-fails")
    throw ConfigError(
        "search target must be conclusion-fails | hypothesis-fails | "
        "hypothesis-fails-and-conclusion-fails");
  s.hypothesis = static_cast<int>(get_uint_or(obj, "hypothesis", where, 0));
  if (s.hypothesis < 0 || s.hypothesis > 5)
    throw ConfigError("search hypothesis must be 0 (any) or 1..5");
  s.budget = static_cast<std::size_t>(get_uint_or(obj, "budget", where, 64));
  if (s.budget == 0) throw ConfigError("search budget must be >= 1");
  const json& ranges = require_key(obj, "ranges", where);
  if (!ranges.is_array() || ranges.empty())
    throw ConfigError("search ranges must be a non-empty array");
  for (const auto& r : ranges) {
    check_keys(r, {"component", "param", "lo", "hi"}, "search range");
    SearchRange sr;
    sr.component = get_string(r, "component", "search range");
    if (sr.component != "baseline" && sr.component != "effect" &&
        sr.component != "covariate")
      throw ConfigError("search range component must be baseline | effect | covariate");
    sr.param = get_string(r, "param", "search range");
    sr.lo = get_number(r, "lo", "search range");
    sr.hi = get_number(r, "hi", "search range");
    if (!(sr.hi > sr.lo)) throw ConfigError("search range needs hi > lo");
    s.ranges.push_back(std::move(sr));
  }
  return s;
}

json grid_to_json(const GridSettings& g) {
  json out;
  out["start"] = g.start;
  out["stop"] = g.stop;
  out["points"] = g.points;
  out["spacing"] = g.log_spacing ? "log" : "linear";
  return out;
}

const char* baseline_family_name(BaselineModel::Family f) {
  switch (f) {
    case BaselineModel::Family::Exponential: return "exponential";
    case BaselineModel::Family::Weibull: return "weibull";
    case BaselineModel::Family::Gompertz: return "gompertz";
    case BaselineModel::Family::LinearHazard: return "linear";
    case BaselineModel::Family::PiecewiseConstant: return "piecewise";
  }
  return "?";
}

const char* effect_family_name(CovariateEffect::Family f) {
  switch (f) {
    case CovariateEffect::Family::ConstantInTime: return "constant";
    case CovariateEffect::Family::Separable: return "separable";
    case CovariateEffect::Family::Affine: return "affine";
    case CovariateEffect::Family::Custom: return "custom";
  }
  return "?";
}

const char* psi_name(CovariateEffect::Psi p) {
  switch (p) {
    case CovariateEffect::Psi::One: return "one";
    case CovariateEffect::Psi::ExpDecay: return "exp_decay";
    case CovariateEffect::Psi::InverseTime: return "inverse_time";
  }
  return "?";
}

const char* covariate_family_name(CovariateDistribution::Family f) {
  switch (f) {
    case CovariateDistribution::Family::Exponential: return "exponential";
    case CovariateDistribution::Family::Gamma: return "gamma";
    case CovariateDistribution::Family::Uniform: return "uniform";
    case CovariateDistribution::Family::Discrete: return "discrete";
  }
  return "?";
}

}  // namespace

Grid Scenario::make_x_grid() const {
  return x_grid.log_spacing
             ? Grid::logspace(x_grid.start, x_grid.stop, x_grid.points)
             : Grid::linspace(x_grid.start, x_grid.stop, x_grid.points);
}

Grid Scenario::make_z_grid() const {
  if (model.covariate().is_discrete()) return Grid(model.covariate().atoms());
  const GridSettings& g = *z_grid;
  return g.log_spacing ? Grid::logspace(g.start, g.stop, g.points)
                       : Grid::linspace(g.start, g.stop, g.points);
}

QuadratureSpec Scenario::quad_spec() const {
  QuadratureSpec q;
  q.abs_tol = tol.quad_abs_tol;
  q.rel_tol = tol.quad_rel_tol;
  q.max_subdivisions = tol.quad_max_subdivisions;
  q.tail_quantile = tol.tail_quantile;
  return q;
}

ToleranceProfile Scenario::tol_profile() const {
  ToleranceProfile p;
  p.sign_slack = tol.sign_slack;
  return p;
}

json Scenario::resolved_json() const {
  json doc;

  json b;
  b["family"] = baseline_family_name(model.baseline().family());
  if (model.baseline().family() == BaselineModel::Family::PiecewiseConstant) {
    b["breaks"] = model.baseline().piecewise_breaks();
    b["rates"] = model.baseline().piecewise_rates();
  } else {
    for (const auto& [name, value] : model.baseline().parameters()) b[name] = value;
  }
  doc["baseline"] = b;

  json e;
  if (model.effect().family() == CovariateEffect::Family::Custom)
    throw ConfigError("custom effects have no file representation");
  e["family"] = effect_family_name(model.effect().family());
  if (model.effect().family() != CovariateEffect::Family::ConstantInTime)
    e["psi"] = psi_name(model.effect().psi());
  for (const auto& [name, value] : model.effect().parameters()) e[name] = value;
  doc["effect"] = e;

  json c;
  c["family"] = covariate_family_name(model.covariate().family());
  if (model.covariate().is_discrete()) {
    c["atoms"] = model.covariate().atoms();
    c["probs"] = model.covariate().weights();
  } else {
    for (const auto& [name, value] : model.covariate().parameters()) c[name] = value;
  }
  doc["covariate"] = c;

  doc["x_grid"] = grid_to_json(x_grid);
  if (z_grid) doc["z_grid"] = grid_to_json(*z_grid);

  json t;
  t["sign_slack"] = tol.sign_slack;
  t["quad_abs_tol"] = tol.quad_abs_tol;
  t["quad_rel_tol"] = tol.quad_rel_tol;
  t["quad_max_subdivisions"] = tol.quad_max_subdivisions;
  t["tail_quantile"] = tol.tail_quantile;
  t["root_tol"] = tol.root_tol;
  doc["tolerances"] = t;

  doc["seed"] = seed;

  json s;
  s["count"] = sample.count;
  s["alpha"] = sample.alpha;
  doc["sample"] = s;

  return doc;
}

Scenario parse_scenario(const json& doc) {
  check_keys(doc,
             {"baseline", "effect", "covariate", "x_grid", "z_grid",
              "tolerances", "seed", "sample", "search"},
             "scenario");

  BaselineModel baseline = parse_baseline(require_key(doc, "baseline", "scenario"));
  CovariateEffect effect = parse_effect(require_key(doc, "effect", "scenario"));
  CovariateDistribution covariate =
      parse_covariate(require_key(doc, "covariate", "scenario"));

  GridSettings xg;
  if (doc.contains("x_grid")) xg = parse_grid(doc.at("x_grid"), "x_grid", GridSettings{});

  std::optional<GridSettings> zg;
  if (covariate.is_discrete()) {
    if (doc.contains("z_grid"))
      throw ConfigError(
          "z_grid is not allowed with a discrete covariate (its atoms are the grid)");
  } else {
    GridSettings defaults = default_z_grid(covariate);
    zg = doc.contains("z_grid") ? parse_grid(doc.at("z_grid"), "z_grid", defaults)
                                : defaults;
  }

  ToleranceSettings tol;
  if (doc.contains("tolerances")) tol = parse_tolerances(doc.at("tolerances"));

  const std::uint64_t seed = get_uint_or(doc, "seed", "scenario", 0);

  SampleSettings sample;
  if (doc.contains("sample")) sample = parse_sample(doc.at("sample"));

  std::optional<SearchSettings> search;
  if (doc.contains("search")) {
    search = parse_search(doc.at("search"));
    for (const auto& r : search->ranges) {
      const json& comp = require_key(doc, r.component, "scenario");
      if (!comp.contains(r.param) || !comp.at(r.param).is_number())
        throw ConfigError("search range targets '" + r.component + "." + r.param +
                          "' which is not a numeric scenario field");
    }
  }

  // Model construction runs the properness validation.
  EahmModel model(std::move(baseline), std::move(effect), std::move(covariate));
  return Scenario{std::move(model), xg,     zg,  tol,
                  seed,             sample, search, doc};
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("scenario file is not valid JSON: " + std::string(e.what()));
  }
  return parse_scenario(doc);
}

}  // namespace eahm
