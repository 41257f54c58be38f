#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "oy/lpp.hpp"

using namespace oy;

TEST_CASE("LPP recursion equals exhaustive enumeration") {
  const TimeGrid g(0.0, 15.0 / 16, 1.0 / 16);  // 16 points
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto env = Environment::generate(seed, g, 0, 3);
    const auto fast = lpp_slices(env, {0, 0.0}, 3);
    const auto slow = lpp_slices_naive(env, {0, 0.0}, 3);
    for (int n = 0; n <= 3; ++n) {
      CHECK(last_passage(env, {0, 0.0}, {n, 15.0 / 16}) == oracle::brute_L(env, {0, 0.0}, {n, 15.0 / 16}));
      CHECK(fast[n].values == slow[n].values);
    }
  }
}

TEST_CASE("streamed passage time equals the stored one") {
  const TimeGrid g(0.0, 4.0, 1.0 / 64);
  const auto env = Environment::generate(77, g, 0, 6);
  CHECK(last_passage_streaming(77, g, {0, 0.0}, {6, 4.0}) == last_passage(env, {0, 0.0}, {6, 4.0}));
}

TEST_CASE("zero-temperature gap obeys the lattice bounds") {
  const double step = 1.0 / 16;
  const TimeGrid g(0.0, 2.0, step);
  const auto env = Environment::generate(3, g, 0, 3);
  const std::vector<double> betas = {1.0, 8.0, 64.0};
  const auto gaps = zero_temperature_check(env, {0, 0.0}, {3, 2.0}, betas);
  // K = 32 cells, log C(32, 3)
  const double log_paths = std::lgamma(33.0) - std::lgamma(4.0) - std::lgamma(30.0);
  for (std::size_t i = 0; i < betas.size(); ++i) {
    CHECK(gaps[i] >= -1e-9);
    CHECK(gaps[i] <= log_paths / betas[i] + 1e-9);
  }
}

TEST_CASE("LPP stationary fields satisfy the exact identities") {
  const double H = default_horizon(1.0);
  const TimeGrid g(-std::ceil(H), 40.0, 1.0 / 32);
  const auto env = Environment::generate(12, g, 0, 3);
  const auto f = build_lpp_stationary_fields(env, 1.0, 3, H);
  const auto ex = check_lpp_exact_identities(env, f);
  CHECK(ex.f_recursion <= 1e-10);
  CHECK(ex.tilde_definition <= 1e-10);
  for (double q : f.q[1]) CHECK(q >= 0.0);
}

TEST_CASE("LPP comparison sandwich") {
  const TimeGrid g(0.0, 60.0, 1.0 / 64);
  const auto env = Environment::generate(41, g, 0, 5);
  const BoundaryWeight bw = BoundaryWeight::from(1.0, env);
  TruncationPolicy pol;
  pol.kappa = 12.0;
  for (const auto& c : {ComparisonCase{ComparisonCase::Kind::Vertical, 4, 0.0, 1.0, 0.0},
                        ComparisonCase{ComparisonCase::Kind::Horizontal, 4, 0.0, 1.0, 2.0}})
    for (const auto& gaps : check_lpp_comparison_levels(env, bw, c, pol)) CHECK(gaps.holds());
}

TEST_CASE("shape check over stored environments") {
  const TimeGrid g(0.0, 8.0, 1.0 / 64);
  std::vector<Environment> envs;
  for (std::uint64_t s = 1; s <= 3; ++s) envs.push_back(Environment::generate(s, g, 0, 8));
  const auto r = shape_check(envs, 1.0, 8);
  CHECK(r.target == 2.0);
  CHECK(r.values.size() == 3);
  CHECK(r.mean > 0.5);
}
