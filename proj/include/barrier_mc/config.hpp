#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace barrier_mc {

// Experiment spec files are flat key/value text with one [section] per
// experiment, so diffs stay line-oriented:
//
//   # comment
//   [ballot_check]
//   kind = survival
//   x = -1
//   lambda = 50
//   band = 0.632, 0.70
//
// Section names become output file names and must match [A-Za-z0-9_.-]+.
struct ExperimentSpec {
  std::string name;
  int line = 0;
  std::map<std::string, std::string> entries;
  std::map<std::string, int> entry_lines;
};

struct SpecFile {
  std::vector<ExperimentSpec> experiments;
};

class SpecParseError : public std::runtime_error {
 public:
  SpecParseError(int line, int column, const std::string& message)
      : std::runtime_error("parse error at line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ": " + message),
        line(line),
        column(column) {}

  int line = 0;
  int column = 0;
};

SpecFile parse_spec_text(const std::string& text);
SpecFile parse_spec_file(const std::string& path);

// Typed access; every reader names the dotted configuration field in its
// ConfigError so failures point at the exact knob.
double require_number(const ExperimentSpec& spec, const std::string& key,
                      const std::string& dotted);
std::optional<double> optional_number(const ExperimentSpec& spec,
                                      const std::string& key,
                                      const std::string& dotted);
std::int64_t require_integer(const ExperimentSpec& spec, const std::string& key,
                             const std::string& dotted);
std::optional<std::int64_t> optional_integer(const ExperimentSpec& spec,
                                             const std::string& key,
                                             const std::string& dotted);
std::string require_word(const ExperimentSpec& spec, const std::string& key,
                         const std::string& dotted);
std::optional<std::string> optional_word(const ExperimentSpec& spec,
                                         const std::string& key,
                                         const std::string& dotted);
std::vector<double> require_list(const ExperimentSpec& spec, const std::string& key,
                                 const std::string& dotted);
std::optional<std::vector<double>> optional_list(const ExperimentSpec& spec,
                                                 const std::string& key,
                                                 const std::string& dotted);
std::optional<bool> optional_flag(const ExperimentSpec& spec, const std::string& key,
                                  const std::string& dotted);

// Validation rejects extraneous keys so typos fail loudly.
void reject_unknown_keys(const ExperimentSpec& spec,
                         std::span<const char* const> allowed);

}  // namespace barrier_mc
