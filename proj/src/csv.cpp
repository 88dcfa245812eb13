#include "barrier_mc/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace barrier_mc {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string opt_num(const std::optional<double>& v) {
  return v ? format_g17(*v) : std::string();
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_opt_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

std::string to_csv_line(const ResultRow& row) {
  std::ostringstream out;
  out << row.experiment << ',' << row.kind << ',' << opt_num(row.x) << ','
      << opt_num(row.y) << ',' << opt_num(row.t) << ',' << opt_num(row.s) << ','
      << opt_num(row.lambda) << ',' << opt_num(row.delta) << ',' << opt_num(row.M)
      << ',' << (row.n ? std::to_string(*row.n) : std::string()) << ','
      << opt_num(row.estimate) << ',' << opt_num(row.std_error) << ','
      << (row.seed ? std::to_string(*row.seed) : std::string()) << ','
      << (row.workers ? std::to_string(*row.workers) : std::string()) << ','
      << opt_num(row.wall_time_s) << ',' << row.verdict;
  return out.str();
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write CSV file '" + path + "'");
  out << kCsvHeader << '\n';
  for (const ResultRow& row : rows) out << to_csv_line(row) << '\n';
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvSchemaError("cannot open CSV file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw CsvSchemaError("CSV header mismatch in '" + path + "'");
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != 16) {
      throw CsvSchemaError("CSV row " + std::to_string(line_no) + " in '" + path +
                           "' has " + std::to_string(fields.size()) +
                           " fields, expected 16");
    }
    try {
      ResultRow row;
      row.experiment = fields[0];
      row.kind = fields[1];
      row.x = parse_opt_double(fields[2]);
      row.y = parse_opt_double(fields[3]);
      row.t = parse_opt_double(fields[4]);
      row.s = parse_opt_double(fields[5]);
      row.lambda = parse_opt_double(fields[6]);
      row.delta = parse_opt_double(fields[7]);
      row.M = parse_opt_double(fields[8]);
      if (!fields[9].empty()) row.n = std::stoll(fields[9]);
      row.estimate = parse_opt_double(fields[10]);
      row.std_error = parse_opt_double(fields[11]);
      if (!fields[12].empty()) row.seed = std::stoull(fields[12]);
      if (!fields[13].empty()) row.workers = std::stoi(fields[13]);
      row.wall_time_s = parse_opt_double(fields[14]);
      row.verdict = fields[15];
      row.estimate_raw = fields[10];
      row.std_error_raw = fields[11];
      rows.push_back(row);
    } catch (const std::exception&) {
      throw CsvSchemaError("CSV row " + std::to_string(line_no) + " in '" + path +
                           "' has a malformed numeric field");
    }
  }
  return rows;
}

}  // namespace barrier_mc
