#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eahm/scenario.hpp"
#include "eahm/theorem.hpp"

namespace eahm {

enum class Command { Eval, Classify, Verify, Search, Sample };

Command parse_command_name(const std::string& name);
const char* to_string(Command c);

struct RunOptions {
  std::filesystem::path out_dir = "eahm_out";
  bool quiet = false;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> grid_points_override;  // applies to the x grid
};

struct RunResult {
  json verdict;  // contents of verdict.json
  std::vector<std::filesystem::path> files_written;
  std::string summary;  // human-readable; includes nothing machine-parsed
  double duration_seconds = 0.0;
};

// Execute one command against a scenario: computes the requested verdicts,
// writes verdict.json (plus per-command side files) atomically under
// opt.out_dir, and returns the document.  Output files are byte-identical
// across runs with the same scenario and options; wall-clock duration is
// returned for display but never written to a file.
RunResult run_command(Command cmd, const Scenario& scenario,
                      const RunOptions& opt);

// JSON projections of analyzer verdicts (shared by run_command and tests).
json to_json(const MonotonicityVerdict& v);
json to_json(const OrderVerdict& v);
json to_json(const Tp2Verdict& v);
json preservation_to_json(const PreservationReport& r);

// 17-significant-digit decimal rendering used for all CSV numbers.
std::string format_csv_number(double v);

// Pretty-printed JSON with every floating-point number rendered at 17
// significant digits (the same rule as the CSVs), so output files are
// byte-stable across platforms and library versions.  Non-finite numbers
// become null.
std::string dump_json_17(const json& doc);

}  // namespace eahm
