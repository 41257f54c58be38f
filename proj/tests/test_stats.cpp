#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "oy/stats.hpp"

using namespace oy;

TEST_CASE("KS statistic equals the hand computation") {
  const std::vector<double> v = {0.05, 0.9, 0.3, 2.2, 1.1, 0.45, 0.7, 3.5};
  const auto exp1 = DistributionSpec::exponential(1.0);
  const auto r = ks_statistic(v, exp1);
  CHECK(r.statistic == doctest::Approx(oracle::ks_by_hand(v, [](double x) { return 1.0 - std::exp(-x); })).epsilon(1e-14));
  CHECK(r.n == v.size());
  CHECK(r.critical == doctest::Approx(1.628 / std::sqrt(8.0)).epsilon(1e-3));
  const auto g = ks_statistic(v, DistributionSpec::gamma(1.0));
  CHECK(g.statistic == doctest::Approx(r.statistic).epsilon(1e-12));
}

TEST_CASE("distribution cdfs") {
  CHECK(DistributionSpec::normal(0.0, 1.0).cdf(0.0) == doctest::Approx(0.5));
  CHECK(DistributionSpec::normal(1.0, 4.0).cdf(3.0) == doctest::Approx(0.841344746068543).epsilon(1e-12));
  CHECK(DistributionSpec::exponential(2.0).cdf(1.0) == doctest::Approx(1.0 - std::exp(-2.0)));
  CHECK(DistributionSpec::gamma(2.0).cdf(1.0) == doctest::Approx(1.0 - 2.0 * std::exp(-1.0)));
  CHECK(DistributionSpec::gamma(2.0).cdf(-1.0) == 0.0);
}

TEST_CASE("moments, correlation and slope") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> y = {3, 5, 7, 9, 11};
  CHECK(mean(x) == 3.0);
  CHECK(variance(x) == doctest::Approx(2.5));
  CHECK(standard_error(x) == doctest::Approx(std::sqrt(2.5 / 5.0)));
  CHECK(correlation(x, y) == doctest::Approx(1.0));
  CHECK(fit_slope(x, y) == doctest::Approx(2.0));
}

TEST_CASE("chi-square") {
  const std::vector<double> e = {25, 25, 25, 25};
  const auto same = chi_square(e, e);
  CHECK(same.statistic == doctest::Approx(0.0));
  CHECK(same.p_value == doctest::Approx(1.0));
  const std::vector<double> o = {35, 15, 25, 25};
  const auto r = chi_square(o, e);
  CHECK(r.statistic == doctest::Approx(8.0));
  CHECK(r.dof == 3);
  // survival of chi-square(3) at 8
  CHECK(r.p_value == doctest::Approx(0.0460117).epsilon(1e-5));
}
