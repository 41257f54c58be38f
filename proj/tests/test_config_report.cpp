#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "oy/config.hpp"
#include "oy/experiments.hpp"
#include "oy/report.hpp"

using namespace oy;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = Config::parse_string(
      "seed = 7  # master\n[grid]\nstep = 2^-8\n[sizes]\nn_list = 8, 16,32\nflag = true\nT = inf\n", "t.cfg");
  CHECK(c.get_u64("seed", 0) == 7);
  CHECK(c.get_double("grid.step") == 0x1.0p-8);
  CHECK(c.get_ints("sizes.n_list") == std::vector<int>{8, 16, 32});
  CHECK(c.get_bool("sizes.flag", false));
  CHECK(std::isinf(c.get_double("sizes.T")));
  CHECK(c.get_double("missing", 2.5) == 2.5);
  CHECK(c.locate("grid.step") == "t.cfg:3: field 'grid.step'");
  CHECK(c.echo().at("grid.step") == "2^-8");
}

TEST_CASE("config errors name the line or field") {
  CHECK(error_of([] { Config::parse_string("[a]\nx = 1\nx = 2\n", "d.cfg"); }).find("d.cfg:3") != std::string::npos);
  CHECK(error_of([] { Config::parse_string("no equals sign\n", "m.cfg"); }).find("m.cfg:1") != std::string::npos);
  const auto c = Config::parse_string("[grid]\nstep = abc\nstray = 1\n", "v.cfg");
  CHECK(error_of([&] { c.get_double("grid.step"); }).find("grid.step") != std::string::npos);
  CHECK(error_of([&] { c.require_known({"grid.step"}); }).find("grid.stray") != std::string::npos);
  CHECK_NOTHROW(c.require_known({"grid.*"}));
  CHECK_THROWS_AS(c.get_string("nope"), ConfigError);
}

TEST_CASE("metric relations and report json") {
  CHECK(Metric::within(1.05, 1.0, 0.1, Provenance::Target).passed());
  CHECK_FALSE(Metric::within(1.2, 1.0, 0.1, Provenance::Target).passed());
  CHECK(Metric::at_most(0.1, 0.1, Provenance::Oracle).passed());
  CHECK_FALSE(Metric::at_least(std::nan(""), 0.0, Provenance::Target).passed());
  CHECK(Metric::diagnostic(3.0).passed());

  Report r("demo", 42, {{"seed", "42"}});
  r.add("a", Metric::at_most(1.0, 2.0, Provenance::Target));
  r.add("b", Metric::diagnostic(7.0));
  CHECK(r.passed());
  r.add("c", Metric::at_least(1.0, 2.0, Provenance::Target));
  CHECK_FALSE(r.passed());
  CHECK(r.failures() == std::vector<std::string>{"c"});
  const auto j = r.to_json();
  CHECK(j["schema_version"] == kReportSchema);
  CHECK(j["experiment"] == "demo");
  CHECK(j["seed"] == 42);
  CHECK(j["metrics"]["a"]["provenance"] == "model_target");
  CHECK(j["passed"] == false);
}

TEST_CASE("experiment dispatch validates its inputs") {
  CHECK(experiment_names().size() == 13);
  CHECK_THROWS_AS(run_experiment("nope", Config::parse_string("")), ConfigError);
  CHECK(error_of([] { run_experiment("burke", Config::parse_string("experiment = shape\n")); })
            .find("experiment") != std::string::npos);
  CHECK(error_of([] { run_experiment("burke", Config::parse_string("[grid]\nstep = 2^-8\n[burke]\nt2 = -0.3\n", "b.cfg")); })
            .find("b.cfg:4: field 'burke.t2'") != std::string::npos);
  CHECK(error_of([] { run_experiment("burke", Config::parse_string("[model]\nlambda = 1\nmu = 2\n")); })
            .find("model.mu") != std::string::npos);
}

TEST_CASE("small experiment run writes a report") {
  const auto cfg = Config::parse_string(
      "seed = 3\n[grid]\nstep = 2^-6\n[sizes]\nn_env = 10\n[zero_temp]\nbetas = 4, 64\nn = 3\nt = 2\nfraction = 0.5\n");
  const std::string dir = "oy_test_out";
  RunOptions opts;
  opts.out_dir = dir;
  const auto rep = run_experiment("zero-temp", cfg, opts);
  CHECK(rep.seed() == 3);
  CHECK(rep.metric("gap_min").passed());
  CHECK(std::filesystem::exists(dir + "/zero-temp.json"));
  CHECK(std::filesystem::exists(dir + "/zero_temp.csv"));
  opts.seed = 4;
  CHECK(run_experiment("zero-temp", cfg, opts).seed() == 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("tolerance model") {
  ToleranceModel m;
  CHECK(m.at(0x1.0p-10) == doctest::Approx(0.05));
  CHECK(m.at(0x1.0p-6) == doctest::Approx(0.2));
}
