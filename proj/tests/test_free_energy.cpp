#include <doctest.h>

#include <cmath>

#include "oy/free_energy.hpp"
#include "oy/lpp.hpp"

using namespace oy;

TEST_CASE("restricted target") {
  // trigamma(1) = 1.645 lies in [1, 2.5]
  CHECK(restricted_target(1.0, 1.0, 2.5) == doctest::Approx(-digamma(1.0)).epsilon(1e-10));
  // clamped to the edge otherwise
  CHECK(restricted_target(1.0, 2.0, 3.0) == doctest::Approx(free_energy_p(2.0).value - 2.0).epsilon(1e-10));
  CHECK(restricted_target(1.0, 2.0, kUnbounded) == doctest::Approx(free_energy_p(2.0).value - 2.0).epsilon(1e-10));
}

TEST_CASE("p(t) - lambda t is concave") {
  CHECK(concavity_violation(1.0, {0.1, 0.5, 1.0, 2.0, 4.0, 10.0}) <= 1e-12);
  CHECK(concavity_violation(0.3, {0.2, 0.3, 0.4}) <= 1e-12);
}

TEST_CASE("maximal energy bounds") {
  const TimeGrid g(0.0, 3.0, 1.0 / 32);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto env = Environment::generate(s, g, 0, 4);
    const auto b = maximal_energy_bound_check(env, 4, 3.0);
    CHECK(b.lattice_slack() >= -1e-9);
    CHECK(b.continuum_slack() >= -1e-9);
    CHECK(b.L == last_passage(env, {0, 0.0}, {4, 3.0}));
    CHECK(b.lattice_bound <= b.continuum_bound + 1e-12);
  }
}

TEST_CASE("restricted free energy shape of the output") {
  const TimeGrid g(0.0, 40.0, 1.0 / 16);
  std::vector<Environment> envs;
  for (std::uint64_t s = 1; s <= 3; ++s) envs.push_back(Environment::generate(s, g, 0, 9));
  TruncationPolicy pol;
  pol.kappa = 3.0;
  const auto r = restricted_free_energy(envs, 1.0, 1.0, 2.5, {4, 8}, pol);
  CHECK(r.values.size() == 2);
  CHECK(r.values[0].size() == 3);
  CHECK(r.target == doctest::Approx(-digamma(1.0)));
  const auto v = unrestricted_variant(envs, 1.0, 1.0, 2.5, {4, 8}, pol);
  CHECK(v.with_bar.values.size() == 2);
  const auto p = point_to_point_free_energy(envs, 8, 1.0);
  CHECK(p.size() == 3);
}
