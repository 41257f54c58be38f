#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "oy/paths.hpp"
#include "oy/rng.hpp"

using namespace oy;

TEST_CASE("marginal densities match simplex summation") {
  const TimeGrid g(0.0, 1.0, 1.0 / 48);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto env = Environment::generate(seed, g, 0, 3);
    const PathSampler ps(env, {0, 0.0}, {3, 1.0});
    for (int k = 0; k < 3; ++k) {
      const auto fast = ps.marginal_density(k);
      const auto ref = oracle::brute_marginal(env, {0, 0.0}, {3, 1.0}, k);
      for (std::size_t x = 0; x < g.n_points; ++x) {
        if (ref[x] == 0.0) {
          CHECK(fast[x] == 0.0);
        } else {
          CHECK(std::abs(fast[x] / ref[x] - 1.0) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("joint law sums to one and samples are admissible") {
  const TimeGrid g(0.0, 0.5, 1.0 / 16);
  const auto env = Environment::generate(3, g, 0, 2);
  const PathSampler ps(env, {0, 0.0}, {2, 0.5});
  double total = 0.0;
  oracle::for_each_tuple(0, g.index(0.5), 2, [&](const std::vector<std::size_t>& x) { total += ps.joint_probability(x); });
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ps.log_Z() == doctest::Approx(oracle::brute_log_Z(env, {0, 0.0}, {2, 0.5})).epsilon(1e-12));
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto p = ps.sample(rng);
    REQUIRE(p.jumps.size() == 2);
    CHECK(p.jumps[0] >= 0.0);
    CHECK(p.jumps[0] < p.jumps[1]);
    CHECK(p.jumps[1] <= 0.5 - 1.0 / 16 + 1e-12);
  }
}

TEST_CASE("min gap probabilities on hand-made paths") {
  std::vector<PolymerPath> paths(2);
  paths[0].jumps = {0.1, 0.2, 3.0};  // gap 0.1 before T
  paths[1].jumps = {0.5, 1.5, 1.6};  // gap 1.0; 0.1 gap starts after T = 1
  const auto p = min_gap_probabilities(paths, 1.0, {2.0, 0.5, 0.05});
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.5);
  CHECK(p[2] == 0.0);
  std::ostringstream os;
  write_paths_csv(os, paths);
  CHECK(os.str().rfind("path_id,stream,k,tau\n", 0) == 0);
}
