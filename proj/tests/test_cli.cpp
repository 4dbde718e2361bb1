#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "lapfol/baseline.hpp"
#include "lapfol/errors.hpp"
#include "lapfol/experiments.hpp"

using namespace lapfol;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lapfol-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(LAPFOL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig config(const std::string& experiment) {
  RunConfig c;
  c.experiment = experiment;
  return c;
}

}  // namespace

TEST_CASE("catalog listing") {
  const std::string s = catalog_list();
  for (const char* needle : {"spaces:", "submetries:", "algebras:", "experiments:", "s3-hopf", "euler-identity",
                             "s2-zonal: z  [s2]", "s2xs2", "t2-circles"})
    CHECK_MESSAGE(s.find(needle) != std::string::npos, needle);
  CHECK(experiments().size() == 12);
  CHECK(config_keys().size() == 14);
}

TEST_CASE("settings and validation") {
  RunConfig c = config("euler-identity");
  apply_setting(c, "phi", "0.5");
  apply_setting(c, "N", "100");
  apply_setting(c, "T", "12.5");
  apply_setting(c, "algebra", "z, z^2");
  CHECK(*c.phi == 0.5);
  CHECK(*c.terms == 100);
  CHECK(c.window == 12.5);
  CHECK(c.algebra.size() == 2);
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "samples", "many"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "tolerance", "1e-3x"), ConfigError);
  for (const auto& [text, want] : std::vector<std::pair<std::string, double>>{
           {"pi", std::numbers::pi}, {"pi/4", std::numbers::pi / 4}, {"3pi/4", 3 * std::numbers::pi / 4},
           {"3*pi/4", 3 * std::numbers::pi / 4}, {"-pi/2", -std::numbers::pi / 2}, {"0.5 * pi", std::numbers::pi / 2}}) {
    apply_setting(c, "phi", text);
    CHECK_MESSAGE(*c.phi == doctest::Approx(want).epsilon(1e-15), text);
  }
  CHECK_THROWS_AS(apply_setting(c, "phi", "pi/0"), ConfigError);
  CHECK_THROWS_AS(apply_setting(c, "phi", "pie"), ConfigError);

  CHECK_THROWS_AS(run_case(config("no-such-experiment")), ConfigError);
  RunConfig bad = config("basic-mean");
  bad.case_id = "s5-nothing";
  CHECK_THROWS_AS(run_case(bad), ConfigError);
  RunConfig neg = config("separation");
  neg.tolerance = -1;
  CHECK_THROWS_AS(run_case(neg), ConfigError);
  RunConfig deg = config("closure");
  deg.degree = 13;
  CHECK_THROWS_AS(run_case(deg), ConfigError);
  RunConfig maxi = config("maximality");
  maxi.algebra = {"z"};
  CHECK_THROWS_AS(run_case(maxi), ConfigError);
}

TEST_CASE("run_case examples") {
  {
    RunConfig c = config("euler-identity");
    c.phi = std::numbers::pi / 4;
    const ReportBundle b = run_case(c);
    CHECK(b.pass());
    REQUIRE(b.reports.size() == 1);
    CHECK(b.reports[0]["details"]["accelerated"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  }
  {
    RunConfig c = config("avg-commute");
    c.case_id = "s2-latitude";
    c.degree = 6;
    const ReportBundle b = run_case(c);
    CHECK(b.pass());
    for (const auto& r : b.reports) CHECK(r["case"] == "s2-latitude");
  }
  {
    RunConfig c = config("closure");
    c.algebra = {"z^3"};
    const ReportBundle b = run_case(c);
    CHECK_FALSE(b.pass());
    REQUIRE(b.reports.size() == 1);
    CHECK(b.reports[0]["details"]["closed"] == false);
  }
  {
    RunConfig c = config("closure");
    c.algebra = {"s3-hopf"};
    CHECK(run_case(c).pass());
  }
}

TEST_CASE("config file sections, and flags win over the file") {
  const fs::path dir = scratch("config");
  const fs::path ini = dir / "run.ini";
  std::ofstream(ini) << "[defaults]\nseed = 11\nN = 500\n\n[euler-identity]\nphi = 1.0\n\n[closure]\nphi = 2.0\n";
  RunConfig c = config("euler-identity");
  load_config_file(c, ini);
  CHECK(c.seed == 11);
  CHECK(*c.terms == 500);
  CHECK(*c.phi == 1.0);
  apply_setting(c, "phi", "0.25");
  CHECK(*c.phi == 0.25);

  std::ofstream(dir / "bad.ini") << "[defaults]\nbogus = 1\n";
  RunConfig d = config("euler-identity");
  CHECK_THROWS_AS(load_config_file(d, dir / "bad.ini"), ConfigError);
}

TEST_CASE("fixed seed gives byte-identical bundles") {
  for (const char* e : {"basic-focal", "separation", "basic-mean"}) {
    RunConfig c = config(e);
    c.seed = 99;
    const fs::path a = scratch(std::string(e) + "-a"), b = scratch(std::string(e) + "-b");
    c.output = a;
    const ReportBundle ra = run_case(c);
    c.output = b;
    const ReportBundle rb = run_case(c);
    CHECK(ra.summary().dump() == rb.summary().dump());
    CHECK(slurp(a / "bundle.json") == slurp(b / "bundle.json"));
    CHECK(fs::exists(a / "reports"));
  }
  RunConfig c = config("basic-focal");
  c.seed = 100;
  RunConfig d = c;
  d.seed = 101;
  CHECK(run_case(c).summary().dump() != run_case(d).summary().dump());
}

TEST_CASE("bundle layout") {
  RunConfig c = config("latitude-trace");
  c.output = scratch("layout");
  const ReportBundle b = run_case(c);
  CHECK(b.pass());
  CHECK(fs::exists(*c.output / "bundle.json"));
  CHECK(fs::exists(*c.output / "data" / "latitude_trace.dat"));
  const Json s = Json::parse(slurp(*c.output / "bundle.json"));
  CHECK(s["experiment"] == "latitude-trace");
  CHECK(s["reports_total"].get<std::size_t>() == b.reports.size());
  CHECK(s["reports_failed"] == 0);
  for (const auto& r : b.reports)
    if (r["operation"] == "trace")
      for (const char* k : {"case", "phi", "trace_direct", "trace_series_raw", "trace_series_accel", "tail_bound", "pass"})
        CHECK_MESSAGE(r.contains(k), k);
}

TEST_CASE("baselines") {
  RunConfig c = config("latitude-trace");
  c.output = scratch("baseline-run");
  run_case(c);
  const fs::path base = scratch("baseline") / "latitude.json";
  CHECK_THROWS_AS(emit_baselines(*c.output, base, false), ConfigError);
  CHECK(emit_baselines(*c.output, base, true).empty());
  CHECK(emit_baselines(*c.output, base, false).empty());
  CHECK(emit_baselines(*c.output / "bundle.json", base, false).empty());

  Json bundle = load_bundle(*c.output);
  std::size_t idx = 0;
  while (bundle["reports"][idx]["operation"] != "trace") ++idx;
  bundle["reports"][idx]["trace_series_accel"] = bundle["reports"][idx]["trace_series_accel"].get<double>() + 1e-3;
  const Json stored = Json::parse(slurp(base))["bundle"];
  const BaselineDiff d = compare_bundles(bundle, stored);
  REQUIRE(d.fields.size() == 1);
  CHECK(d.fields[0] == "reports[" + std::to_string(idx) + "].trace_series_accel");

  // Drift inside the tolerance is not reported; a flipped verdict always is.
  Json tiny = stored;
  tiny["reports"][idx]["trace_series_accel"] = stored["reports"][idx]["trace_series_accel"].get<double>() * (1 + 1e-12);
  CHECK(compare_bundles(tiny, stored).empty());
  Json flipped = stored;
  flipped["reports"][idx]["pass"] = false;
  CHECK(compare_bundles(flipped, stored).fields == std::vector<std::string>{"reports[" + std::to_string(idx) + "].pass"});
  Json extra = stored;
  extra["reports"][idx]["new_field"] = 1;
  CHECK_FALSE(compare_bundles(extra, stored).empty());
}

TEST_CASE("command-line exit codes") {
  CHECK(cli("catalog") == 0);
  CHECK(cli("") == 2);
  CHECK(cli("run no-such-experiment") == 2);
  CHECK(cli("run euler-identity --no-such-flag 1") == 2);
  CHECK(cli("run euler-identity --phi 0.7") == 0);
  CHECK(cli("run euler-identity --phi abc") == 2);
  CHECK(cli("run closure --algebra 'z^3'") == 1);
  CHECK(cli("run closure --algebra z --json") == 0);

  const fs::path dir = scratch("cli");
  std::ofstream(dir / "c.ini") << "[reynolds]\ndegree = 3\n";
  CHECK(cli("run reynolds --config " + (dir / "c.ini").string() + " --output " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "bundle.json"));
  CHECK(cli("baseline " + (dir / "out").string() + " " + (dir / "base.json").string()) == 2);
  CHECK(cli("baseline " + (dir / "out").string() + " " + (dir / "base.json").string() + " --init") == 0);
  CHECK(cli("baseline " + (dir / "out").string() + " " + (dir / "base.json").string()) == 0);
  fs::remove_all(fs::temp_directory_path() / ("lapfol-test-" + std::to_string(::getpid())));
}
