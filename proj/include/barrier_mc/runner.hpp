#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "barrier_mc/config.hpp"
#include "barrier_mc/csv.hpp"

namespace barrier_mc {

// Fixed default so every run is reproducible out of the box; override with
// --seed, a spec-file `seed`, or BARRIER_MC_SEED (in that order of strength).
inline constexpr std::uint64_t kDefaultMasterSeed = 20240817ull;

struct RunOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<int> workers_override;
  bool plot = false;
  std::string out_dir = ".";
  // Suite mode pins the wall_time_s column to 0 so reruns are byte-identical;
  // plain runs record measured seconds.
  bool zero_wall_time = false;
};

// Exit codes, total over all termination paths:
//   0  success, no FAIL verdicts
//   1  FAIL verdicts present, or replay value mismatch
//   2  spec parse error (reported with line and column)
//   3  configuration validation error (reported with the field name)
//   4  runtime estimator error
//   5  replay schema mismatch
int cmd_run(const std::string& spec_path, const RunOptions& opt);
int cmd_replay(const std::string& csv_path, const std::string& spec_path);
int cmd_suite(const std::string& which, const RunOptions& opt);

// Runs one experiment section into result rows. Exposed for tests.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      const RunOptions& opt);

// The bundled desk-scale reproduction suite, in the regular spec format.
const char* bundled_paper_spec();

}  // namespace barrier_mc
