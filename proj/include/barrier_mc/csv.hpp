#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace barrier_mc {

// One result row per (experiment, parameter cell). Sub-results of an
// experiment carry a ":tag" suffix on the experiment name (e.g. "asym:ratio");
// the column set itself never varies.
struct ResultRow {
  std::string experiment;
  std::string kind;
  std::optional<double> x, y, t, s, lambda, delta, M;
  std::optional<std::int64_t> n;
  std::optional<double> estimate, std_error;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<double> wall_time_s;
  std::string verdict = "N/A";

  // Raw rendered fields, populated by the reader; replay compares these
  // byte-wise against freshly rendered values.
  std::string estimate_raw, std_error_raw;
};

inline constexpr const char* kCsvHeader =
    "experiment,kind,x,y,t,s,lambda,delta,M,n,estimate,std_error,seed,workers,"
    "wall_time_s,verdict";

class CsvSchemaError : public std::runtime_error {
 public:
  explicit CsvSchemaError(const std::string& what) : std::runtime_error(what) {}
};

// 17 significant digits: round-trips doubles exactly.
std::string format_g17(double v);

std::string to_csv_line(const ResultRow& row);
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(const std::string& path);

}  // namespace barrier_mc
