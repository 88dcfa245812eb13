#include "barrier_mc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "barrier_mc/errors.hpp"

namespace barrier_mc {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.' || c == '-';
  });
}

double parse_double(const ExperimentSpec& spec, const std::string& key,
                    const std::string& raw, const std::string& dotted) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("experiment '" + spec.name + "': field " + dotted +
                      " (key '" + key + "') is not a number: '" + raw + "'");
  }
}

}  // namespace

SpecFile parse_spec_text(const std::string& text) {
  SpecFile file;
  ExperimentSpec* current = nullptr;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw SpecParseError(line_no, static_cast<int>(raw.size()),
                             "unterminated section header");
      }
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!valid_name(name)) {
        throw SpecParseError(line_no, 2, "invalid section name '" + name + "'");
      }
      for (const ExperimentSpec& e : file.experiments) {
        if (e.name == name) {
          throw SpecParseError(line_no, 2, "duplicate section '" + name + "'");
        }
      }
      file.experiments.push_back({name, line_no, {}, {}});
      current = &file.experiments.back();
      continue;
    }
    const std::size_t eq = raw.find('=');
    if (eq == std::string::npos) {
      throw SpecParseError(line_no, 1, "expected 'key = value'");
    }
    if (current == nullptr) {
      throw SpecParseError(line_no, 1, "entry before any [section]");
    }
    const std::string key = trim(raw.substr(0, eq));
    const std::string value = trim(raw.substr(eq + 1));
    if (!valid_name(key)) {
      throw SpecParseError(line_no, 1, "invalid key '" + key + "'");
    }
    if (value.empty()) {
      throw SpecParseError(line_no, static_cast<int>(eq + 2), "empty value");
    }
    if (current->entries.count(key) != 0) {
      throw SpecParseError(line_no, 1, "duplicate key '" + key + "'");
    }
    current->entries[key] = value;
    current->entry_lines[key] = line_no;
  }
  if (file.experiments.empty()) {
    throw SpecParseError(line_no, 1, "spec file declares no experiments");
  }
  return file;
}

SpecFile parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError(0, 0, "cannot open spec file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str());
}

double require_number(const ExperimentSpec& spec, const std::string& key,
                      const std::string& dotted) {
  const auto it = spec.entries.find(key);
  if (it == spec.entries.end()) {
    throw ConfigError("experiment '" + spec.name + "': missing required field " +
                      dotted + " (key '" + key + "')");
  }
  return parse_double(spec, key, it->second, dotted);
}

std::optional<double> optional_number(const ExperimentSpec& spec,
                                      const std::string& key,
                                      const std::string& dotted) {
  const auto it = spec.entries.find(key);
  if (it == spec.entries.end()) return std::nullopt;
  return parse_double(spec, key, it->second, dotted);
}

std::int64_t require_integer(const ExperimentSpec& spec, const std::string& key,
                             const std::string& dotted) {
  const auto it = spec.entries.find(key);
  if (it == spec.entries.end()) {
    throw ConfigError("experiment '" + spec.name + "': missing required field " +
                      dotted + " (key '" + key + "')");
  }
  std::int64_t value = 0;
  const auto* first = it->second.data();
  const auto* last = first + it->second.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("experiment '" + spec.name + "': field " + dotted +
                      " (key '" + key + "') is not an integer: '" + it->second + "'");
  }
  return value;
}

std::optional<std::int64_t> optional_integer(const ExperimentSpec& spec,
                                             const std::string& key,
                                             const std::string& dotted) {
  if (spec.entries.count(key) == 0) return std::nullopt;
  return require_integer(spec, key, dotted);
}

std::string require_word(const ExperimentSpec& spec, const std::string& key,
                         const std::string& dotted) {
  const auto it = spec.entries.find(key);
  if (it == spec.entries.end()) {
    throw ConfigError("experiment '" + spec.name + "': missing required field " +
                      dotted + " (key '" + key + "')");
  }
  return it->second;
}

std::optional<std::string> optional_word(const ExperimentSpec& spec,
                                         const std::string& key,
                                         const std::string&) {
  const auto it = spec.entries.find(key);
  if (it == spec.entries.end()) return std::nullopt;
  return it->second;
}

std::vector<double> require_list(const ExperimentSpec& spec, const std::string& key,
                                 const std::string& dotted) {
  const std::string raw = require_word(spec, key, dotted);
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= raw.size()) {
    const std::size_t comma = raw.find(',', start);
    const std::string item =
        trim(raw.substr(start, comma == std::string::npos ? std::string::npos
                                                          : comma - start));
    if (item.empty()) {
      throw ConfigError("experiment '" + spec.name + "': field " + dotted +
                        " has an empty list entry");
    }
    values.push_back(parse_double(spec, key, item, dotted));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

std::optional<std::vector<double>> optional_list(const ExperimentSpec& spec,
                                                 const std::string& key,
                                                 const std::string& dotted) {
  if (spec.entries.count(key) == 0) return std::nullopt;
  return require_list(spec, key, dotted);
}

std::optional<bool> optional_flag(const ExperimentSpec& spec, const std::string& key,
                                  const std::string& dotted) {
  const auto it = spec.entries.find(key);
  if (it == spec.entries.end()) return std::nullopt;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError("experiment '" + spec.name + "': field " + dotted +
                    " (key '" + key + "') is not a boolean: '" + it->second + "'");
}

void reject_unknown_keys(const ExperimentSpec& spec,
                         std::span<const char* const> allowed) {
  for (const auto& [key, value] : spec.entries) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) {
      throw ConfigError("experiment '" + spec.name + "': unknown key '" + key +
                        "' (line " + std::to_string(spec.entry_lines.at(key)) + ")");
    }
  }
}

}  // namespace barrier_mc
