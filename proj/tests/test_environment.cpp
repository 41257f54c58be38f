#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "oy/environment.hpp"
#include "oy/stats.hpp"

using namespace oy;

TEST_CASE("time grid indexing") {
  const TimeGrid g(-1.0, 2.0, 0.25);
  CHECK(g.n_points == 13);
  CHECK(g.index(0.0) == 4);
  CHECK(g.time(12) == doctest::Approx(2.0));
  CHECK(g.contains(1.5));
  CHECK_FALSE(g.contains(0.1));
  CHECK_THROWS_AS(g.index(0.1), GridError);
  CHECK_THROWS_AS(g.index(2.25), GridError);
  CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0.3), GridError);
  const TimeGrid w = g.window(0.0, 1.0);
  CHECK(w.n_points == 5);
  CHECK(w.absolute(0) == g.absolute(4));
}

TEST_CASE("generation is reproducible and pinned at 0") {
  const TimeGrid g(-2.0, 2.0, 0x1.0p-6);
  const auto a = Environment::generate(11, g, 0, 3);
  const auto b = Environment::generate(11, g, 0, 3);
  const auto c = Environment::generate(12, g, 0, 3);
  CHECK(a.path(2) == b.path(2));
  CHECK(a.path(2) != c.path(2));
  for (int i = 0; i <= 3; ++i) CHECK(a.value(i, g.index(0.0)) == 0.0);
}

TEST_CASE("increments depend only on the absolute grid position") {
  const TimeGrid wide(-4.0, 4.0, 0x1.0p-5);
  const TimeGrid narrow(-1.0, 2.0, 0x1.0p-5);
  const auto a = Environment::generate(5, wide, 0, 4);
  const auto b = Environment::generate(5, narrow, 2, 3);
  for (int lvl = 2; lvl <= 3; ++lvl)
    for (double s : {-1.0, 0.5, 1.25}) CHECK(a.increment(lvl, s, 2.0) == b.increment(lvl, s, 2.0));
  // one level at a time reproduces the multi-level field
  const auto single = Environment::generate(5, wide, 4, 4);
  CHECK(single.path(4) == a.path(4));
}

TEST_CASE("increments are quantized and Normal(0, step)") {
  const double step = 0x1.0p-4;
  const TimeGrid g(0.0, 256.0, step);
  const auto env = Environment::generate(99, g, 0, 0);
  std::vector<double> z;
  for (std::size_t k = 0; k + 1 < g.n_points; ++k) {
    const double inc = env.increment_index(0, k, k + 1);
    CHECK(std::ldexp(inc, 36) == std::round(std::ldexp(inc, 36)));
    z.push_back(inc / std::sqrt(step));
  }
  const auto ks = ks_statistic(z, DistributionSpec::normal(0.0, 1.0));
  CHECK(ks.statistic < ks.critical);
  CHECK(std::abs(mean(z)) < 4.0 / std::sqrt(static_cast<double>(z.size())));
}

TEST_CASE("coarsen and window keep path values") {
  const TimeGrid g(0.0, 2.0, 0x1.0p-6);
  const auto env = Environment::generate(3, g, 0, 2);
  const auto c = env.coarsen(4);
  CHECK(c.grid().step == doctest::Approx(0x1.0p-4));
  for (std::size_t k = 0; k < c.grid().n_points; ++k) CHECK(c.value(1, k) == env.value(1, 4 * k));
  CHECK_THROWS_AS(Environment::generate(3, TimeGrid(0.0, 3 * 0x1.0p-6, 0x1.0p-6), 0, 0).coarsen(2), GridError);
  const auto w = env.window(0.5, 1.5);
  CHECK(w.increment(2, 0.5, 1.5) == env.increment(2, 0.5, 1.5));
}

TEST_CASE("save and load round trip") {
  const TimeGrid g(-1.0, 1.0, 0.125);
  const auto env = Environment::generate(8, g, 1, 3);
  const std::string file = "oy_env_roundtrip.bin";
  env.save(file);
  const auto back = Environment::load(file);
  std::remove(file.c_str());
  CHECK(back.level_lo() == 1);
  CHECK(back.level_hi() == 3);
  CHECK(back.seed() == 8);
  CHECK(back.grid().same_as(g));
  for (int i = 1; i <= 3; ++i) CHECK(back.path(i) == env.path(i));
}

TEST_CASE("memory budget is enforced") {
  const std::size_t saved = environment_memory_budget();
  environment_memory_budget() = 100;
  CHECK_THROWS_AS(Environment::generate(1, TimeGrid(0.0, 1.0, 0x1.0p-6), 0, 3), MemoryBudgetError);
  environment_memory_budget() = saved;
}

TEST_CASE("scaled view") {
  const auto env = Environment::generate(2, TimeGrid(0.0, 1.0, 0.25), 0, 1);
  const EnvView v = scale(env, 3.0);
  CHECK(v.increment(1, 0.0, 1.0) == doctest::Approx(3.0 * env.increment(1, 0.0, 1.0)));
  CHECK_THROWS(scale(env, 0.0));
}
