#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "barrier_mc/config.hpp"
#include "barrier_mc/csv.hpp"
#include "barrier_mc/errors.hpp"
#include "barrier_mc/svg.hpp"

using namespace barrier_mc;

TEST_CASE("spec parsing: sections, comments, key/values") {
  const SpecFile file = parse_spec_text(
      "# a comment\n"
      "[exp_one]\n"
      "kind = survival\n"
      "x = -1\n"
      "list = 1, 2, 3\n"
      "\n"
      "; another comment style\n"
      "[exp.two]\n"
      "kind = fg\n");
  REQUIRE(file.experiments.size() == 2);
  CHECK(file.experiments[0].name == "exp_one");
  CHECK(file.experiments[0].entries.at("x") == "-1");
  CHECK(file.experiments[1].name == "exp.two");
  CHECK(require_number(file.experiments[0], "x", "endpoints.x") == -1.0);
  const auto list = require_list(file.experiments[0], "list", "some.list");
  CHECK(list == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("spec parse errors carry line and column") {
  try {
    parse_spec_text("[ok]\nkind = survival\nbroken line\n");
    FAIL("expected parse error");
  } catch (const SpecParseError& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_spec_text("x = 1\n"), SpecParseError);       // entry before section
  CHECK_THROWS_AS(parse_spec_text("[a]\nx = 1\n[a]\ny = 2\n"), SpecParseError);
  CHECK_THROWS_AS(parse_spec_text("[bad name!]\n"), SpecParseError);
  CHECK_THROWS_AS(parse_spec_text("[a]\nx =\n"), SpecParseError);
  CHECK_THROWS_AS(parse_spec_text(""), SpecParseError);
}

TEST_CASE("validation errors name the dotted field") {
  const SpecFile file = parse_spec_text("[exp]\nkind = survival\n");
  const ExperimentSpec& spec = file.experiments[0];
  try {
    require_number(spec, "lambda", "ppp.rate_lambda");
    FAIL("expected config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("ppp.rate_lambda") != std::string::npos);
  }
  const char* allowed[] = {"kind"};
  CHECK_NOTHROW(reject_unknown_keys(spec, allowed));
  const SpecFile extra = parse_spec_text("[exp]\nkind = survival\nbogus = 1\n");
  CHECK_THROWS_AS(reject_unknown_keys(extra.experiments[0], allowed), ConfigError);
}

TEST_CASE("g17 formatting round-trips doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -1.7e-300, 0.6321205588285577}) {
    const std::string s = format_g17(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("csv write/read round trip preserves rows and raw fields") {
  const std::string path = std::filesystem::temp_directory_path() / "bmc_test.csv";
  std::vector<ResultRow> rows;
  ResultRow row;
  row.experiment = "exp:ratio";
  row.kind = "asymptotic";
  row.x = -1.0;
  row.t = 64.0;
  row.n = 1000;
  row.estimate = 1.0 / 3.0;
  row.std_error = 0.001;
  row.seed = 20240817u;
  row.workers = 2;
  row.wall_time_s = 0.0;
  row.verdict = "PASS";
  rows.push_back(row);
  write_csv(path, rows);

  const auto back = read_csv(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].experiment == "exp:ratio");
  CHECK(back[0].x == -1.0);
  CHECK_FALSE(back[0].y.has_value());
  CHECK(back[0].estimate == 1.0 / 3.0);
  CHECK(back[0].estimate_raw == format_g17(1.0 / 3.0));
  CHECK(back[0].seed == 20240817u);
  CHECK(back[0].verdict == "PASS");
  std::filesystem::remove(path);
}

TEST_CASE("csv reader rejects foreign headers, short rows, malformed numbers") {
  const std::string path = std::filesystem::temp_directory_path() / "bmc_bad.csv";
  {
    std::ofstream out(path);
    out << "a,b,c\n1,2,3\n";
  }
  CHECK_THROWS_AS((void)read_csv(path), CsvSchemaError);
  {
    std::ofstream out(path);
    out << kCsvHeader << "\nonly,three,fields\n";
  }
  CHECK_THROWS_AS((void)read_csv(path), CsvSchemaError);
  {
    std::ofstream out(path);
    out << kCsvHeader << "\nexp,survival,bogus,,,,,,,,1,0,1,1,0,N/A\n";
  }
  CHECK_THROWS_AS((void)read_csv(path), CsvSchemaError);
  std::filesystem::remove(path);
}

TEST_CASE("svg rendering is deterministic and skips degenerate input") {
  const std::vector<PlotPoint> points{{16.0, 0.1}, {64.0, 0.025}, {256.0, 0.007}};
  const std::string a = render_loglog_svg(points, "scaling");
  const std::string b = render_loglog_svg(points, "scaling");
  CHECK(a == b);
  CHECK(a.find("<svg") == 0);
  CHECK(a.find("circle") != std::string::npos);
  CHECK(render_loglog_svg({}, "empty").empty());
}
