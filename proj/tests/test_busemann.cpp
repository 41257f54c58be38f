#include <doctest.h>

#include <cmath>

#include "oy/busemann.hpp"

using namespace oy;

TEST_CASE("theta snapping and endpoint rules") {
  CHECK(snap_theta(1.0, 0.25) == 1.0);
  CHECK(snap_theta(1.1, 0.25) == 1.0);
  CHECK(snap_theta(0.01, 0.25) == 0.25);
  CHECK(endpoint_time(16, 1.0, EndpointRule::Linear, 0.25) == 16.0);
  CHECK(endpoint_time(16, 1.0, EndpointRule::LinearPlusSqrt, 0.25) == 20.0);
  CHECK_THROWS(snap_theta(-1.0, 0.25));
}

TEST_CASE("estimate error bar and decrease rule") {
  BusemannEstimate e;
  e.n = {8, 16, 32, 64};
  e.value = {1.0, 1.4, 1.3, 1.35};
  const auto d = e.successive_differences();
  CHECK(d[1] == doctest::Approx(0.4));
  CHECK(e.error_bar() == doctest::Approx(0.1));
  CHECK(e.differences_decrease());
  e.value = {1.0, 1.01, 1.3, 1.5};
  CHECK_FALSE(e.differences_decrease());
}

TEST_CASE("sequences from slices match direct ratios and satisfy the cocycle") {
  const double step = 1.0 / 32;
  const TimeGrid g(0.0, 20.0, step);
  const auto env = Environment::generate(9, g, 0, 16);
  const std::vector<int> ns = {4, 8, 16};
  const auto xy = ratio_sequence(env, {0, 0.0}, {1, 0.0}, 1.0, ns, EndpointRule::Linear);
  const auto fx = forward_slices(env, {0, 0.0}, 16), fy = forward_slices(env, {1, 0.0}, 16);
  const auto again = sequence_from_slices(fx, fy, g, 1.0, ns, EndpointRule::Linear);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CHECK(again.value[i] == doctest::Approx(xy.value[i]).epsilon(1e-12));
    CHECK(xy.value[i] ==
          doctest::Approx(point_to_point_log_Z(env, {0, 0.0}, {ns[i], xy.t_n[i]}) -
                          point_to_point_log_Z(env, {1, 0.0}, {ns[i], xy.t_n[i]})).epsilon(1e-12));
  }
  const auto xz = ratio_sequence(env, {0, 0.0}, {0, 1.0}, 1.0, ns, EndpointRule::Linear);
  const auto yz = ratio_sequence(env, {1, 0.0}, {0, 1.0}, 1.0, ns, EndpointRule::Linear);
  for (double r : check_cocycle(xy, yz, xz)) CHECK(r <= 1e-10);
}

TEST_CASE("comparison sandwich holds at every level") {
  const double step = 1.0 / 64;
  const TimeGrid g(0.0, 80.0, step);
  const auto env = Environment::generate(31, g, 0, 5);
  const BoundaryWeight bw = BoundaryWeight::from(1.0, env);
  TruncationPolicy pol;
  pol.kappa = 10.0;
  for (const auto& c : {ComparisonCase{ComparisonCase::Kind::Vertical, 4, 0.0, 1.0, 0.0},
                        ComparisonCase{ComparisonCase::Kind::Horizontal, 4, 0.0, 1.0, 2.0}}) {
    const auto levels = check_comparison_levels(env, bw, c, pol);
    for (const auto& gaps : levels) CHECK(gaps.holds());
    const auto last = check_comparison(env, bw, c, pol);
    CHECK(last.middle == levels.back().middle);
  }
}

TEST_CASE("gamma shape fit recovers the shape") {
  std::vector<double> q;
  // Exp(1) quantiles
  for (int i = 1; i <= 999; ++i) q.push_back(-std::log(1.0 - i / 1000.0));
  CHECK(fit_gamma_shape_ks(q) == doctest::Approx(1.0).epsilon(0.02));
}
