#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "oy/partition.hpp"

using namespace oy;

TEST_CASE("prefix recursion equals direct recursion and enumeration") {
  const TimeGrid g(0.0, 1.0, 1.0 / 16);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto env = Environment::generate(seed, g, 0, 4);
    const auto fast = forward_slices(env, {1, 0.125}, 4);
    const auto slow = forward_slices_naive(env, {1, 0.125}, 4);
    for (std::size_t r = 0; r < fast.size(); ++r)
      for (std::size_t k = 0; k < g.n_points; ++k) {
        if (slow[r].values[k] == kLogZero) {
          CHECK(fast[r].values[k] == kLogZero);
        } else {
          CHECK(fast[r].values[k] == doctest::Approx(slow[r].values[k]).epsilon(1e-12));
        }
      }
    for (int n = 1; n <= 4; ++n)
      CHECK(point_to_point_log_Z(env, {1, 0.125}, {n, 1.0}) ==
            doctest::Approx(oracle::brute_log_Z(env, {1, 0.125}, {n, 1.0})).epsilon(1e-12));
  }
}

TEST_CASE("zero environment counts lattice simplices") {
  const double step = 0.125;
  const auto env = Environment::zero(TimeGrid(0.0, 2.0, step), 0, 3);
  // K = 16 cells, C(16, 3) step^3
  CHECK(std::exp(point_to_point_log_Z(env, {0, 0.0}, {3, 2.0})) == doctest::Approx(560.0 * step * step * step));
}

TEST_CASE("degenerate point-to-point cases") {
  const auto env = Environment::generate(4, TimeGrid(0.0, 1.0, 0.0625), 0, 2);
  CHECK(point_to_point_log_Z(env, {1, 0.25}, {1, 0.75}) == doctest::Approx(env.increment(1, 0.25, 0.75)));
  CHECK(point_to_point_log_Z(env, {0, 0.5}, {2, 0.5}) == kLogZero);
  CHECK(point_to_point_log_Z(env, {0, 0.5}, {1, 0.5 + 0.0625}) != kLogZero);
}

TEST_CASE("restricted point-to-line pieces add up") {
  const TimeGrid g(0.0, 40.0, 1.0 / 32);
  const auto env = Environment::generate(21, g, 0, 3);
  const BoundaryWeight bw = BoundaryWeight::from(1.0, env);
  TruncationPolicy pol;
  pol.kappa = 8.0;
  const auto all = point_to_line_log_Zbar(env, bw, {0, 0.0}, 2, Restriction::none(), pol);
  const auto lo = point_to_line_log_Zbar(env, bw, {0, 0.0}, 2, Restriction::below(3.0), pol);
  const auto hi = point_to_line_log_Zbar(env, bw, {0, 0.0}, 2, Restriction::above(3.0), pol);
  CHECK(log_add(lo.log_value, hi.log_value) == doctest::Approx(all.log_value).epsilon(1e-12));
  const auto mid = point_to_line_log_Zbar(env, bw, {0, 0.0}, 2, Restriction::interval(1.0, 2.0), pol);
  CHECK(mid.log_value < lo.log_value);
  TruncationPolicy tiny;
  tiny.kappa = 0.05;
  CHECK_THROWS_AS(point_to_line_log_Zbar(env, bw, {0, 0.0}, 2, Restriction::none(), tiny), TruncationError);
}

TEST_CASE("log-Euler SDE approaches the lattice recursion as the step shrinks") {
  const TimeGrid fine(0.0, 2.0, 1.0 / 1024);
  const auto env = Environment::generate(6, fine, 0, 3);
  auto gap = [&](const Environment& e) {
    return std::abs(evolve_sde(e, 0, 3, 2.0).back().values.back() - forward_slices(e, {0, 0.0}, 3).back().values.back());
  };
  const double coarse = gap(env.coarsen(16)), finer = gap(env);
  CHECK(finer < coarse);
  CHECK(finer < 0.05);
}

TEST_CASE("slice CSV has a header and one row per finite value") {
  const auto env = Environment::generate(6, TimeGrid(0.0, 0.5, 0.125), 0, 1);
  std::ostringstream os;
  write_slices_csv(os, forward_slices(env, {0, 0.0}, 1), env.grid());
  CHECK(os.str().rfind("level,time,logZ\n", 0) == 0);
}
