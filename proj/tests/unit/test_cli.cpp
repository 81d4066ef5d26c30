#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "helpers.hpp"
#include "ioshock/report.hpp"
#include "ioshock_cli/cli.hpp"

namespace {

namespace fs = std::filesystem;
const auto kE2 = unit::data_dir() / "e2";

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ioshock::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> e2_args(const std::string& cmd, const fs::path& out) {
  return {cmd,
          "--table", (kE2 / "table.csv").string(),
          "--meta", (kE2 / "sectors.csv").string(),
          "--satellites", (kE2 / "satellites.csv").string(),
          "--out", out.string()};
}

std::vector<std::string> plus(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_CASE("cli validate: valid, corrupted and missing inputs") {
  unit::TempDir dir("cli_validate");
  auto ok = invoke(e2_args("validate", dir / "ok"));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("validation passed") != std::string::npos);
  CHECK(fs::exists(dir / "ok" / "validation.csv"));

  std::string table = unit::read_text(kE2 / "table.csv");
  table.replace(table.find("S2,30,40,30,0,0,0,0,0,100"), 25, "S2,30,40,30,0,0,0,0,0,120");
  table.replace(table.find("TOTAL_USES,100,100"), 18, "TOTAL_USES,100,120");
  unit::write_text(dir / "bad.csv", table);
  auto bad = invoke({"validate", "--table", (dir / "bad.csv").string(), "--meta",
                     (kE2 / "sectors.csv").string(), "--out", (dir / "bad").string()});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("row_identity S2") != std::string::npos);

  auto missing = invoke({"validate", "--table", (dir / "nope.csv").string(), "--meta",
                         (kE2 / "sectors.csv").string(), "--out", (dir / "m").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("nope.csv") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "m"));
}

TEST_CASE("cli usage errors exit 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  unit::TempDir dir("cli_usage");
  auto args = plus(e2_args("run", dir.path()),
                   {"--scenario", (kE2 / "scenario.json").string(), "--method", "magic"});
  CHECK(invoke(args).code == 2);
  args = plus(e2_args("run", dir.path()),
              {"--scenario", (kE2 / "scenario.json").string(), "--format", "xlsx"});
  CHECK(invoke(args).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("cli multipliers") {
  unit::TempDir dir("cli_mult");
  auto r = invoke(plus(e2_args("multipliers", dir.path()), {"--sector", "S1", "--top-k", "2"}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("1. S1 3.75000") != std::string::npos);
  CHECK(r.out.find("2. S2 2.91667") != std::string::npos);
  CHECK(r.out.find("employment multiplier 0.50000") != std::string::npos);
  CHECK(r.out.find("rank 2 lowest of 2") != std::string::npos);
  CHECK(fs::exists(dir / "multipliers.csv"));
  CHECK(fs::exists(dir / "input_recipe.csv"));
  CHECK(fs::exists(dir / "plotdata_top2.csv"));
  CHECK(invoke(plus(e2_args("multipliers", dir.path()), {"--sector", "S9"})).code == 2);
}

TEST_CASE("cli run on the two-sector fixture") {
  unit::TempDir dir("cli_run");
  auto r = invoke(plus(e2_args("run", dir.path()), {"--scenario", (kE2 / "scenario.json").string()}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("inoperability: output_change -45") != std::string::npos);
  for (const char* f : {"multipliers.csv", "impact_inoperability.csv", "impact_extraction.csv",
                        "comparison.csv", "plotdata_top10.csv", "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(dir / f), f);
  }
  const auto inop = ioshock::read_impact_json(dir / "impact_inoperability.json");
  CHECK(inop.dx(0) == -30.0);
  CHECK(inop.dx(1) == -15.0);
  const auto ex = ioshock::read_impact_json(dir / "impact_extraction.json");
  CHECK(ex.aggregates.output_change < inop.aggregates.output_change);

  auto r2 = invoke(plus(e2_args("run", dir / "realloc"),
                        {"--scenario", (kE2 / "scenario_realloc.json").string(), "--method",
                         "inoperability"}));
  REQUIRE(r2.code == 0);
  CHECK_FALSE(fs::exists(dir / "realloc" / "impact_extraction.csv"));
  // L * [-12, 6] = [-25, -2.5]
  const auto re = ioshock::read_impact_json(dir / "realloc" / "impact_inoperability.json");
  CHECK(re.dx(0) == -25.0);
  CHECK(re.dx(1) == doctest::Approx(-2.5).epsilon(0.5));
}

TEST_CASE("cli run with a zero shock") {
  unit::TempDir dir("cli_zero");
  unit::write_text(dir / "zero.json",
                   R"({"name":"zero","target_sector":"S1","sub_service_drop":0,
                       "component_ratios":{"EXP":0},"intermediate":{"default_ratio":1}})");
  auto r = invoke(plus(e2_args("run", dir / "out"), {"--scenario", (dir / "zero.json").string()}));
  REQUIRE(r.code == 0);
  for (const char* m : {"impact_inoperability.json", "impact_extraction.json"}) {
    const auto impact = ioshock::read_impact_json(dir / "out" / m);
    CHECK(impact.dx.isZero(0));
    CHECK(impact.q.isZero(0));
  }
}

TEST_CASE("cli blowup flags") {
  unit::TempDir dir("cli_blowup");
  auto r = invoke(plus(e2_args("run", dir / "b"),
                       {"--scenario", (kE2 / "scenario.json").string(), "--blowup", "2"}));
  REQUIRE(r.code == 0);
  const auto scaled = ioshock::read_impact_json(dir / "b" / "impact_inoperability.json");
  CHECK(scaled.dx(0) == -60.0);
  CHECK(scaled.q(0) == -0.3);
  CHECK(scaled.blowup_applied == 2.0);

  unit::write_text(dir / "h.json",
                   R"({"final_demand":{"2015":100,"2016":104.8,"2017":108.992},
                       "gdp_growth":{"2016":0.04,"2017":0.04,"2018":0.04,"2019":0.04}})");
  r = invoke(plus(e2_args("run", dir / "h"), {"--scenario", (kE2 / "scenario.json").string(),
                                              "--blowup-history", (dir / "h.json").string()}));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("estimated blowup factor 1.089936") != std::string::npos);

  r = invoke(plus(e2_args("run", dir / "x"), {"--scenario", (kE2 / "scenario.json").string(),
                                              "--blowup", "2", "--blowup-history",
                                              (dir / "h.json").string()}));
  CHECK(r.code == 2);
}

TEST_CASE("cli non-productive economy exits 3") {
  unit::TempDir dir("cli_np");
  unit::write_text(dir / "t.csv",
                   "sector,A,B,HH,NPISH,GOV,GFCF,INV,EXP,total_output\n"
                   "A,60,60,-20,0,0,0,0,0,100\n"
                   "B,60,60,-20,0,0,0,0,0,100\n"
                   "IMPORTS,0,0,,,,,,,\n"
                   "VALUE_ADDED,-20,-20,,,,,,,\n"
                   "TOTAL_USES,100,100,,,,,,,\n");
  unit::write_text(dir / "m.csv", "code,name\nA,a\nB,b\n");
  auto r = invoke({"multipliers", "--table", (dir / "t.csv").string(), "--meta",
                   (dir / "m.csv").string(), "--out", (dir / "o").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("non-productive") != std::string::npos);
}

TEST_CASE("cli reruns are byte-identical and independent of --jobs") {
  unit::TempDir dir("cli_det");
  const std::vector<std::string> scen{"--scenario", (kE2 / "scenario.json").string(), "--scenario",
                                      (kE2 / "scenario_realloc.json").string()};
  auto a = invoke(plus(e2_args("run", dir / "a"), scen));
  auto b = invoke(plus(e2_args("run", dir / "b"), plus(scen, {"--jobs", "2"})));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir / "a");
    CHECK_MESSAGE(unit::read_text(entry.path()) == unit::read_text(dir / "b" / rel), rel.string());
    ++compared;
  }
  CHECK(compared > 10);
  CHECK(fs::exists(dir / "a" / "e2_scenario1" / "impact_inoperability.csv"));
  CHECK(fs::exists(dir / "a" / "e2_scenario2" / "comparison.csv"));
}

TEST_CASE("cli compare reads two impact reports") {
  unit::TempDir dir("cli_cmp");
  REQUIRE(invoke(plus(e2_args("run", dir / "run"), {"--scenario", (kE2 / "scenario.json").string()}))
              .code == 0);
  auto r = invoke({"compare", "--impact", (dir / "run" / "impact_inoperability.json").string(),
                   "--impact", (dir / "run" / "impact_extraction.json").string(), "--out",
                   (dir / "cmp").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "cmp" / "comparison.csv"));
  CHECK(r.out.find("comparison inoperability - extraction") != std::string::npos);
  CHECK(invoke({"compare", "--impact", (dir / "run" / "impact_inoperability.json").string()}).code == 2);
}

TEST_CASE("cli output directory defaults to the environment") {
  unit::TempDir dir("cli_env");
  ::setenv("IOSHOCK_OUT_DIR", (dir / "env").c_str(), 1);
  auto r = invoke({"validate", "--table", (kE2 / "table.csv").string(), "--meta",
                   (kE2 / "sectors.csv").string()});
  ::unsetenv("IOSHOCK_OUT_DIR");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "env" / "validation.csv"));
}
