#include "eahm/rundoc.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eahm/errors.hpp"
#include "eahm/version.hpp"

namespace eahm {
namespace {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write output file: " + tmp.string());
    out << content;
    if (!out) throw ConfigError("failed writing output file: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void dump_json_value(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        out += json(it.key()).dump();
        out += ": ";
        dump_json_value(it.value(), out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_json_value(el, out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_csv_number(v) : "null";
      return;
    }
    default:
      // strings (escaped), integers, booleans, null
      out += j.dump();
      return;
  }
}

json index_or_null(const std::optional<std::size_t>& idx) {
  return idx ? json(*idx) : json(nullptr);
}

json pair_or_null(const std::optional<IndexPair>& p) {
  if (!p) return json(nullptr);
  json j;
  j["i"] = p->i;
  j["j"] = p->j;
  return j;
}

const char* hazard_class_name(Direction d) {
  switch (d) {
    case Direction::Increasing: return "ifr";
    case Direction::Decreasing: return "dfr";
    case Direction::Constant: return "ifr-and-dfr";
    case Direction::Mixed: return "neither";
  }
  return "?";
}

const char* curvature_class_name(Direction d) {
  switch (d) {
    case Direction::Increasing: return "dlr";
    case Direction::Decreasing: return "ilr";
    case Direction::Constant: return "ilr-and-dlr";
    case Direction::Mixed: return "neither";
  }
  return "?";
}

Scenario apply_overrides(const Scenario& sc, const RunOptions& opt) {
  if (!opt.seed_override && !opt.grid_points_override) return sc;
  json doc = sc.source;
  if (opt.seed_override) doc["seed"] = *opt.seed_override;
  if (opt.grid_points_override) {
    if (!doc.contains("x_grid")) doc["x_grid"] = json::object();
    doc["x_grid"]["points"] = *opt.grid_points_override;
  }
  return parse_scenario(doc);
}

// ---- command bodies --------------------------------------------------------

struct CommandOutput {
  json checks = json::array();
  json outputs = json::object();
  std::vector<std::pair<std::string, std::string>> files;  // name -> content
  std::string summary;
};

CommandOutput do_eval(const Scenario& sc) {
  CommandOutput out;
  const Grid xg = sc.make_x_grid();
  const QuadratureSpec spec = sc.quad_spec();
  const EahmModel& m = sc.model;

  std::ostringstream csv;
  csv << "x,S(x),S*(x),f*(x),h(x),h*(x)\n";
  double prev_s_star = 1.0;
  bool nonincreasing = true;
  bool all_finite = true;
  double s_star_start = 0.0;
  for (std::size_t i = 0; i < xg.size(); ++i) {
    const double x = xg[i];
    const double s = m.baseline().survival(x);
    const double s_star = overall_survival(m, x, spec);
    const double f_star = overall_density(m, x, spec);
    const double h = m.baseline().hazard(x);
    const double h_star = overall_hazard(m, x, spec);
    if (i == 0) s_star_start = s_star;
    if (i > 0 && s_star > prev_s_star + sc.tol.sign_slack) nonincreasing = false;
    if (!(std::isfinite(s) && std::isfinite(s_star) && std::isfinite(f_star) &&
          std::isfinite(h) && std::isfinite(h_star)))
      all_finite = false;
    prev_s_star = s_star;
    csv << format_csv_number(x) << ',' << format_csv_number(s) << ','
        << format_csv_number(s_star) << ',' << format_csv_number(f_star) << ','
        << format_csv_number(h) << ',' << format_csv_number(h_star) << '\n';
  }
  out.files.emplace_back("curves.csv", csv.str());
  out.outputs["curves_csv"] = "curves.csv";

  json table;
  table["name"] = "curve-table";
  table["rows"] = xg.size();
  table["x_start"] = xg.front();
  table["x_stop"] = xg.back();
  table["pass"] = all_finite;
  out.checks.push_back(table);

  json sanity;
  sanity["name"] = "survival-sanity";
  sanity["overall_survival_at_grid_start"] = s_star_start;
  sanity["overall_survival_nonincreasing"] = nonincreasing;
  sanity["pass"] =
      nonincreasing && s_star_start <= 1.0 + sc.tol.sign_slack;
  out.checks.push_back(sanity);

  std::ostringstream sum;
  sum << "eval: " << xg.size() << " rows over x in [" << xg.front() << ", "
      << xg.back() << "]";
  out.summary = sum.str();
  return out;
}

CommandOutput do_classify(const Scenario& sc) {
  CommandOutput out;
  const Grid xg = sc.make_x_grid();
  const QuadratureSpec spec = sc.quad_spec();
  const ToleranceProfile tol = sc.tol_profile();
  const EahmModel& m = sc.model;
  const std::size_t n = xg.size();

  std::vector<double> h(n), f(n), s(n), h_star(n), f_star(n), s_star(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = m.baseline().hazard(xg[i]);
    f[i] = m.baseline().density(xg[i]);
    s[i] = m.baseline().survival(xg[i]);
    s_star[i] = overall_survival(m, xg[i], spec);
    f_star[i] = overall_density(m, xg[i], spec);
    h_star[i] = overall_hazard(m, xg[i], spec);
  }

  std::string baseline_class, overall_class;
  {
    MonotonicityVerdict v = check_ifr_dfr(h, tol);
    baseline_class = hazard_class_name(v.direction);
    json j = to_json(v);
    j["name"] = "baseline-hazard-shape";
    j["aging_class"] = baseline_class;
    out.checks.push_back(j);
  }
  {
    // Log-curvature needs positive densities: trim any zero-density edge
    // points (e.g. at x = 0 for strictly increasing hazards from zero).
    std::vector<double> pos;
    std::vector<double> pts;
    for (std::size_t i = 0; i < n; ++i)
      if (f[i] > 0.0) {
        pos.push_back(f[i]);
        pts.push_back(xg[i]);
      }
    json j;
    if (pos.size() >= 3) {
      MonotonicityVerdict v = check_ilr_dlr(pos, Grid(pts), tol);
      j = to_json(v);
      j["aging_class"] = curvature_class_name(v.direction);
    } else {
      j["aging_class"] = "undetermined";
    }
    j["name"] = "baseline-density-curvature";
    j["points_used"] = pos.size();
    out.checks.push_back(j);
  }
  {
    MonotonicityVerdict v = check_ifr_dfr(h_star, tol);
    overall_class = hazard_class_name(v.direction);
    json j = to_json(v);
    j["name"] = "overall-hazard-shape";
    j["aging_class"] = overall_class;
    out.checks.push_back(j);
  }
  {
    MonotonicityVerdict v = check_ilr_dlr(f_star, xg, tol);
    json j = to_json(v);
    j["name"] = "overall-density-curvature";
    j["aging_class"] = curvature_class_name(v.direction);
    out.checks.push_back(j);
  }
  {
    // Order of the overall lifetime against the baseline one.
    OrderVerdict v = check_st_order(s_star, s, tol);
    json j = to_json(v);
    j["name"] = "overall-vs-baseline-st";
    out.checks.push_back(j);
  }
  {
    OrderVerdict v = check_lr_order(f_star, f, tol);
    json j = to_json(v);
    j["name"] = "overall-vs-baseline-lr";
    out.checks.push_back(j);
  }

  std::ostringstream sum;
  sum << "classify: baseline hazard " << baseline_class << ", overall hazard "
      << overall_class;
  out.summary = sum.str();
  return out;
}

CommandOutput do_verify(const Scenario& sc) {
  CommandOutput out;
  const PreservationReport rep =
      verify_dfr_to_dlr(sc.model, sc.make_x_grid(), sc.make_z_grid(),
                        sc.tol_profile(), sc.quad_spec());
  out.checks = preservation_to_json(rep);

  std::ostringstream sum;
  sum << "verify: status " << to_string(rep.status);
  if (!rep.failed_hypotheses.empty()) {
    sum << " (failed hypotheses:";
    for (int i : rep.failed_hypotheses) sum << ' ' << i;
    sum << ')';
  }
  for (const auto& hyp : rep.hypotheses)
    sum << "\n  " << hyp.name << ": " << (hyp.holds ? "holds" : "fails") << " - "
        << hyp.summary;
  sum << "\n  " << rep.conclusion.name << ": "
      << (rep.conclusion.holds ? "holds" : "fails") << " - "
      << rep.conclusion.summary;
  out.summary = sum.str();
  return out;
}

CommandOutput do_search(const Scenario& sc) {
  CommandOutput out;
  const SearchOutcome res = search_counterexample(sc);

  json j;
  j["name"] = "search-outcome";
  j["target"] = sc.search ? sc.search->target : "";
  j["budget"] = sc.search ? sc.search->budget : 0;
  j["found"] = res.found;
  j["evaluated"] = res.evaluated;
  j["invalid_candidates"] = res.invalid_candidates;
  out.checks.push_back(j);

  if (res.found) {
    for (const auto& entry : preservation_to_json(*res.report))
      out.checks.push_back(entry);
    out.files.emplace_back("found_scenario.json",
                           dump_json_17(res.scenario->resolved_json()) + "\n");
    out.outputs["found_scenario_json"] = "found_scenario.json";
  }

  std::ostringstream sum;
  sum << "search: " << (res.found ? "found a match" : "exhausted the budget")
      << " after " << res.evaluated << " verified candidates ("
      << res.invalid_candidates << " invalid)";
  if (res.found && res.report)
    sum << "; status " << to_string(res.report->status);
  out.summary = sum.str();
  return out;
}

CommandOutput do_sample(const Scenario& sc) {
  CommandOutput out;
  const QuadratureSpec spec = sc.quad_spec();
  const EahmModel& m = sc.model;

  std::vector<double> samples = sample_lifetimes(m, sc.seed, sc.sample.count);
  std::ostringstream csv;
  csv << "lifetime\n";
  for (double x : samples) csv << format_csv_number(x) << '\n';
  out.files.emplace_back("samples.csv", csv.str());
  out.outputs["samples_csv"] = "samples.csv";

  const Grid eval_grid = Grid::linspace(sc.x_grid.start, sc.x_grid.stop, 101);
  SamplingReport rep = verify_sampling_consistency(m, sc.seed, sc.sample.count,
                                                   sc.sample.alpha, eval_grid, spec);
  json j;
  j["name"] = "sampling-dkw";
  j["n"] = rep.n;
  j["alpha"] = rep.alpha;
  j["sup_distance"] = rep.sup_distance;
  j["dkw_bound"] = rep.dkw_bound;
  j["pass"] = rep.pass;
  out.checks.push_back(j);

  std::ostringstream sum;
  sum << "sample: n = " << rep.n << ", sup distance "
      << rep.sup_distance << (rep.pass ? " within " : " EXCEEDS ")
      << "bound " << rep.dkw_bound;
  out.summary = sum.str();
  return out;
}

}  // namespace

Command parse_command_name(const std::string& name) {
  if (name == "eval") return Command::Eval;
  if (name == "classify") return Command::Classify;
  if (name == "verify") return Command::Verify;
  if (name == "search") return Command::Search;
  if (name == "sample") return Command::Sample;
  throw ConfigError("unknown command '" + name + "'");
}

const char* to_string(Command c) {
  switch (c) {
    case Command::Eval: return "eval";
    case Command::Classify: return "classify";
    case Command::Verify: return "verify";
    case Command::Search: return "search";
    case Command::Sample: return "sample";
  }
  return "?";
}

std::string format_csv_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  if (ec != std::errc())
    throw NumericError("number formatting failed");
  return std::string(buf, ptr);
}

std::string dump_json_17(const json& doc) {
  std::string out;
  dump_json_value(doc, out, 0);
  return out;
}

json to_json(const MonotonicityVerdict& v) {
  json j;
  j["direction"] = to_string(v.direction);
  j["margin"] = v.margin;
  j["rise_witness"] = pair_or_null(v.rise_witness);
  j["fall_witness"] = pair_or_null(v.fall_witness);
  return j;
}

json to_json(const OrderVerdict& v) {
  json j;
  j["relation"] = to_string(v.relation);
  j["margin"] = v.margin;
  j["against_holds"] = index_or_null(v.against_holds);
  j["against_reversed"] = index_or_null(v.against_reversed);
  return j;
}

json to_json(const Tp2Verdict& v) {
  json j;
  j["classification"] = to_string(v.classification);
  j["margin"] = v.margin;
  auto witness = [](const std::optional<Tp2Witness>& w) -> json {
    if (!w) return json(nullptr);
    json x;
    x["x_indices"] = {w->x1, w->x2};
    x["z_indices"] = {w->z1, w->z2};
    x["log_det"] = w->log_det;
    x["det"] = w->det;
    return x;
  };
  j["positive_minor"] = witness(v.positive);
  j["negative_minor"] = witness(v.negative);
  return j;
}

json preservation_to_json(const PreservationReport& r) {
  json checks = json::array();
  for (std::size_t i = 0; i < r.hypotheses.size(); ++i) {
    const auto& h = r.hypotheses[i];
    json j;
    j["name"] = h.name;
    j["kind"] = "hypothesis";
    j["index"] = i + 1;
    j["holds"] = h.holds;
    j["margin"] = h.margin;
    j["summary"] = h.summary;
    switch (i) {
      case 0: j["detail"] = to_json(r.baseline_hazard); break;
      case 1: j["detail"] = to_json(r.effect_monotonicity.in_x); break;
      case 2: j["detail"] = to_json(r.effect_monotonicity.in_z); break;
      case 3: {
        json d = to_json(r.conditional_hazard_sign);
        d["required"] = r.sign_regularity_required == Tp2Class::Both
                            ? "either"
                            : to_string(r.sign_regularity_required);
        j["detail"] = d;
        break;
      }
      case 4: {
        json d = to_json(r.conditional_log_convexity.aggregate);
        d["concave_slice"] = index_or_null(r.conditional_log_convexity.negative_slice);
        j["detail"] = d;
        break;
      }
    }
    checks.push_back(j);
  }
  {
    json j;
    j["name"] = r.conclusion.name;
    j["kind"] = "conclusion";
    j["holds"] = r.conclusion.holds;
    j["margin"] = r.conclusion.margin;
    j["summary"] = r.conclusion.summary;
    j["detail"] = to_json(r.conclusion_curvature);
    checks.push_back(j);
  }
  {
    json j;
    j["name"] = "preservation-status";
    j["status"] = to_string(r.status);
    j["failed_hypotheses"] = r.failed_hypotheses;
    j["regridded"] = r.regridded;
    j["x_grid_size"] = r.x_grid_points.size();
    j["z_grid_size"] = r.z_grid_points.size();
    checks.push_back(j);
  }
  return checks;
}

RunResult run_command(Command cmd, const Scenario& scenario,
                      const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = apply_overrides(scenario, opt);

  CommandOutput body;
  switch (cmd) {
    case Command::Eval: body = do_eval(sc); break;
    case Command::Classify: body = do_classify(sc); break;
    case Command::Verify: body = do_verify(sc); break;
    case Command::Search: body = do_search(sc); break;
    case Command::Sample: body = do_sample(sc); break;
  }

  json doc;
  doc["tool"] = "eahm";
  doc["version"] = kVersion;
  doc["command"] = to_string(cmd);
  doc["scenario"] = sc.resolved_json();
  doc["checks"] = body.checks;
  doc["outputs"] = body.outputs;

  RunResult res;
  res.verdict = doc;

  std::filesystem::create_directories(opt.out_dir);
  write_file_atomic(opt.out_dir / "verdict.json", dump_json_17(doc) + "\n");
  res.files_written.push_back(opt.out_dir / "verdict.json");
  for (const auto& [name, content] : body.files) {
    write_file_atomic(opt.out_dir / name, content);
    res.files_written.push_back(opt.out_dir / name);
  }

  const auto t1 = std::chrono::steady_clock::now();
  res.duration_seconds = std::chrono::duration<double>(t1 - t0).count();
  res.summary = body.summary;
  return res;
}

}  // namespace eahm
