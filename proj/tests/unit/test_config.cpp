#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mixtype/errors.hpp"
#include "mixtype_cli/config.hpp"
#include "mixtype_cli/run.hpp"

using namespace mixtype;
using namespace mixtype::cli;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(std::string_view text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("accepted: " << text);
  return ErrorKind::Config;
}

std::string message_of(std::string_view text) {
  try {
    (void)parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

nlohmann::json load(const fs::path& p) {
  std::ifstream f(p);
  return nlohmann::json::parse(f);
}

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / "mixtype-test" / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("defaults parse from an empty file") {
  const RunConfig c = parse_config("");
  CHECK(c.scenario == Scenario::CompositeLinear);
  CHECK(c.h == 1.0 / 64);
  CHECK(c.delta_schedule.size() == 4);
}

TEST_CASE("keys, comments and lists") {
  const RunConfig c = parse_config(
      "scenario = nash-moser  # trailing comment\n"
      "\n"
      "[grid]\n"
      "h = 0.03125\n"
      "[solver]\n"
      "delta_schedule = 1e-2, 1e-4\n"
      "enforce_invariants = false\n"
      "[nashmoser]\n"
      "psi = 1 + p1^2\n"
      "max_levels = 2\n");
  CHECK(c.scenario == Scenario::NashMoser);
  CHECK(c.h == 0.03125);
  CHECK(c.delta_schedule == std::vector<double>{1e-2, 1e-4});
  CHECK_FALSE(c.enforce_invariants);
  CHECK(c.psi == "1 + p1^2");
  CHECK(c.max_levels == 2);
}

TEST_CASE("malformed configs are config errors naming the line") {
  CHECK(kind_of("[grid]\nsize = 3\n") == ErrorKind::Config);
  CHECK(kind_of("[mesh]\n") == ErrorKind::Config);
  CHECK(kind_of("h = 0.1\n") == ErrorKind::Config);  // outside its section
  CHECK(kind_of("[grid]\nh = 0.1\nh = 0.2\n") == ErrorKind::Config);
  CHECK(kind_of("[grid]\nh = 0.1x\n") == ErrorKind::Config);
  CHECK(kind_of("[solver]\nenforce_invariants = yes\n") == ErrorKind::Config);
  CHECK(kind_of("[solver]\ndelta_schedule = 1e-2,,1e-3\n") == ErrorKind::Config);
  CHECK(kind_of("scenario = everything\n") == ErrorKind::Config);
  CHECK(kind_of("[grid\n") == ErrorKind::Config);
  CHECK(kind_of("[grid]\njust words\n") == ErrorKind::Config);
  CHECK(message_of("\n[grid]\nh = 1\nfoo = 2\n").find("line 4") != std::string::npos);
}

TEST_CASE("echo covers every key and parses back") {
  RunConfig c;
  c.h = 0.1;
  c.preset = "custom";
  c.epsilon_schedule = {0.5, 0.25};
  std::string text, section = "-";
  for (const auto& [key, value] : c.echo()) {
    const auto dot = key.find('.');
    const std::string s = dot == std::string::npos ? "" : key.substr(0, dot);
    if (s != section) {
      section = s;
      if (!s.empty()) text += "[" + s + "]\n";
    }
    text += key.substr(dot == std::string::npos ? 0 : dot + 1) + " = " + value + "\n";
  }
  const RunConfig back = parse_config(text);
  CHECK(back.echo() == c.echo());
  CHECK(config_schema().find("[nashmoser]") != std::string::npos);
}

TEST_CASE("presets") {
  RunConfig c;
  CHECK(c.coefficients().K(0.5, 0.2) == doctest::Approx(0.25 - 0.04));
  c.preset = "reversed";
  CHECK(c.coefficients().K(0.5, 0.2) == doctest::Approx(0.04 - 0.25));
  c.preset = "custom";
  c.K = "x^2 - 4*y^2";
  c.gamma1 = "-0.5*x";
  c.gamma2 = "0.5*x";
  CHECK(c.domain().gamma2(0.4) == doctest::Approx(0.2));
  CHECK_NOTHROW(c.domain().validate());
  c.preset = "other";
  CHECK_THROWS_AS(c.coefficients(), Error);
  c.preset = "tricomi_cross";
  c.data = "manufactured";
  c.exact = "x^2*y";
  // f = u_yy + K u_xx = (x^2 - y^2) 2 y
  CHECK(c.coefficients().f(0.5, 0.3) == doctest::Approx((0.25 - 0.09) * 0.6));
  CHECK(c.composite_options().dirichlet(0.5, 0.3) == doctest::Approx(0.075));
}

TEST_CASE("zero data composite run writes a zero grid and exits 0") {
  RunConfig c;
  c.h = 1.0 / 32;
  c.out = scratch("zero").string();
  std::ostringstream log;
  CHECK(run(c, log) == 0);
  const nlohmann::json r = load(fs::path(c.out) / "report.json");
  CHECK(r["exit_code"] == 0);
  CHECK(r["error"].is_null());
  CHECK(r["config"]["grid.h"] == "0.03125");
  for (const auto& a : r["assertions"]) CHECK(a["pass"] == true);
  std::ifstream u(fs::path(c.out) / "u.csv");
  std::string line;
  std::getline(u, line);
  CHECK(line == "x,y,value");
  int rows = 0;
  while (std::getline(u, line)) {
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "0");
  }
  CHECK(rows > 100);
  CHECK(fs::exists(fs::path(c.out) / "region_map.csv"));
  // timings stay out of the report
  CHECK_FALSE(r.contains("timing"));
  CHECK(fs::exists(fs::path(c.out) / "timing.json"));
}

TEST_CASE("reversed preset: counterexample exits 0, composite run exits 3") {
  RunConfig c;
  c.h = 1.0 / 32;
  c.preset = "reversed";
  c.scenario = Scenario::Counterexample;
  c.out = scratch("counter").string();
  std::ostringstream log;
  CHECK(run(c, log) == 0);
  CHECK(load(fs::path(c.out) / "report.json")["diagnostics"]["failure_mode"] == "orientation");

  c.scenario = Scenario::CompositeLinear;
  c.out = scratch("reversed").string();
  CHECK(run(c, log) == 3);
  const nlohmann::json r = load(fs::path(c.out) / "report.json");
  CHECK(r["error"]["kind"] == "OrientationFailure");
  CHECK(r["exit_code"] == 3);
}

TEST_CASE("failed assertions exit 1") {
  RunConfig c;
  c.h = 1.0 / 32;
  c.data = "manufactured";
  c.tolerance = 1e-12;
  c.scenario = Scenario::EllipticOnly;
  c.out = scratch("tight").string();
  std::ostringstream log;
  CHECK(run(c, log) == 1);
}

TEST_CASE("MIXTYPE_THREADS is validated") {
  ::setenv("MIXTYPE_THREADS", "4", 1);
  CHECK(requested_threads() == 4);
  ::setenv("MIXTYPE_THREADS", "0", 1);
  CHECK_THROWS_AS(requested_threads(), Error);
  RunConfig c;
  c.h = 1.0 / 16;
  c.out = scratch("threads").string();
  std::ostringstream log;
  CHECK(run(c, log) == 2);
  ::setenv("MIXTYPE_THREADS", "two", 1);
  CHECK_THROWS_AS(requested_threads(), Error);
  ::unsetenv("MIXTYPE_THREADS");
  CHECK(requested_threads() == 1);
}
