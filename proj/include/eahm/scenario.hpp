#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eahm/analyzers.hpp"
#include "eahm/grid.hpp"
#include "eahm/model.hpp"

namespace eahm {

using json = nlohmann::ordered_json;

struct GridSettings {
  double start = 0.0;
  double stop = 10.0;
  std::size_t points = 201;
  bool log_spacing = false;
};

struct ToleranceSettings {
  double sign_slack = 1e-9;
  double quad_abs_tol = 1e-10;
  double quad_rel_tol = 1e-8;
  std::size_t quad_max_subdivisions = 32768;
  double tail_quantile = 1.0 - 1e-10;
  double root_tol = 1e-12;
};

struct SampleSettings {
  std::size_t count = 200000;
  double alpha = 0.001;
};

struct SearchRange {
  std::string component;  // "baseline" | "effect" | "covariate"
  std::string param;      // numeric key inside that component object
  double lo = 0.0;
  double hi = 0.0;
};

struct SearchSettings {
  // "conclusion-fails" | "hypothesis-fails" | "hypothesis-fails-and-conclusion-fails"
  std::string target = "conclusion-fails";
  int hypothesis = 0;  // 0 = any hypothesis; 1..5 a specific one
  std::size_t budget = 64;
  std::vector<SearchRange> ranges;
};

// A fully validated model description plus the run settings that came with
// it.  `source` preserves the parsed input document so parameter searches
// can perturb single fields and re-validate through the same parser.
struct Scenario {
  EahmModel model;
  GridSettings x_grid;
  // Resolved z grid for continuous covariates; a discrete covariate always
  // uses its atoms and carries no grid settings.
  std::optional<GridSettings> z_grid;
  ToleranceSettings tol;
  std::uint64_t seed = 0;
  SampleSettings sample;
  std::optional<SearchSettings> search;
  json source;

  Grid make_x_grid() const;
  Grid make_z_grid() const;
  QuadratureSpec quad_spec() const;
  ToleranceProfile tol_profile() const;

  // Fully explicit document: every default filled in, search section
  // dropped.  Re-parsing it reproduces this scenario exactly.
  json resolved_json() const;
};

// Strict parser: unknown keys, missing required keys, or invalid parameter
// values raise ConfigError naming the offending key.
Scenario parse_scenario(const json& doc);
Scenario load_scenario_file(const std::filesystem::path& path);

}  // namespace eahm
