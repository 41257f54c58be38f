#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "oy/numerics.hpp"

using namespace oy;

TEST_CASE("log_sum_exp handles empty, -inf and large inputs") {
  CHECK(log_sum_exp(std::vector<double>{}) == kLogZero);
  CHECK(log_sum_exp(std::vector<double>{kLogZero, kLogZero}) == kLogZero);
  CHECK(log_sum_exp(std::vector<double>{1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_sum_exp(std::vector<double>{-1000.0, kLogZero}) == doctest::Approx(-1000.0));
  CHECK(log_add(kLogZero, 0.5) == 0.5);
  CHECK(log_add(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)).epsilon(1e-15));
}

TEST_CASE("digamma special values and recurrence") {
  CHECK(digamma(1.0) == doctest::Approx(-0.57721566490153286).epsilon(1e-13));
  CHECK(digamma(0.5) == doctest::Approx(-0.57721566490153286 - 2.0 * std::log(2.0)).epsilon(1e-13));
  for (double x : {0.01, 0.3, 1.7, 5.0, 42.0})
    CHECK(digamma(x + 1.0) - digamma(x) == doctest::Approx(1.0 / x).epsilon(1e-12));
  CHECK_THROWS_AS(digamma(0.0), std::domain_error);
  CHECK_THROWS_AS(trigamma(-1.0), std::domain_error);
}

TEST_CASE("trigamma matches the defining series") {
  CHECK(trigamma(1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-13));
  for (double x : {0.05, 0.5, 1.0, 2.5, 9.0, 30.0})
    CHECK(trigamma(x) == doctest::Approx(oracle::trigamma_series(x)).epsilon(1e-11));
  // tetragamma is the derivative of trigamma
  for (double x : {0.4, 1.3, 7.0}) {
    const double h = 1e-5;
    CHECK(tetragamma(x) == doctest::Approx((trigamma(x + h) - trigamma(x - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("inverse_trigamma round trips") {
  for (double l : {0.02, 0.3, 1.0, 1.43, 4.0, 50.0}) CHECK(inverse_trigamma(trigamma(l)) == doctest::Approx(l).epsilon(1e-10));
  CHECK(inverse_trigamma(std::numbers::pi * std::numbers::pi / 6.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(inverse_trigamma(0.0));
}

TEST_CASE("free energy agrees with golden-section minimization") {
  for (double t : {0.25, 1.0, 2.5, 8.0}) {
    const auto p = free_energy_p(t);
    const double ref = oracle::golden_min([&](double l) { return l * t - digamma(l); }, 1e-3, 50.0);
    CHECK(p.value == doctest::Approx(ref).epsilon(1e-10));
    CHECK(trigamma(p.lambda) == doctest::Approx(t).epsilon(1e-10));
  }
  CHECK(free_energy_p(1.0).value == doctest::Approx(1.4610).epsilon(1e-4));
}

TEST_CASE("regularized incomplete gamma") {
  for (double x : {0.1, 1.0, 3.0, 20.0}) CHECK(regularized_gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)));
  // P(2, x) = 1 - e^{-x}(1 + x)
  for (double x : {0.1, 2.0, 9.0})
    CHECK(regularized_gamma_p(2.0, x) == doctest::Approx(1.0 - std::exp(-x) * (1.0 + x)).epsilon(1e-12));
  for (double a : {0.3, 4.0, 40.0})
    for (double x : {0.5, 5.0, 60.0})
      CHECK(regularized_gamma_p(a, x) + regularized_gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(regularized_gamma_p(3.0, 0.0) == 0.0);
}
