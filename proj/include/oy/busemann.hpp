#pragma once

#include <cstdint>
#include <vector>

#include "oy/environment.hpp"
#include "oy/partition.hpp"
#include "oy/stats.hpp"

namespace oy {

enum class EndpointRule {
  Linear,          // t_n = n theta (theta snapped to the grid)
  LinearPlusSqrt,  // t_n = n theta + sqrt(n), rounded to the grid
};

/// theta rounded to a multiple of the step, so n theta is a grid time for every n.
double snap_theta(double theta, double step);
double endpoint_time(int n, double theta, EndpointRule rule, double step);

struct BusemannEstimate {
  Point x, y;
  double theta = 0.0;
  EndpointRule rule = EndpointRule::Linear;
  std::vector<int> n;
  std::vector<double> t_n;
  std::vector<double> value;  // log Z_{x,(n,t_n)} - log Z_{y,(n,t_n)} (or passage-time difference)

  /// |value[i] - value[i-1]|, aligned with n (first entry 0).
  std::vector<double> successive_differences() const;
  double estimate() const { return value.back(); }
  /// max of the last two successive differences
  double error_bar() const;
  /// last successive difference <= first one (entries for n[1] and n.back())
  bool differences_decrease(double slack = 1e-9) const;
};

BusemannEstimate ratio_sequence(EnvView env, Point x, Point y, double theta, const std::vector<int>& n_list,
                                EndpointRule rule);

/// Same sequence read from precomputed slices (row i is level base.level + i),
/// e.g. forward_slices or lpp_slices from x and from y.
BusemannEstimate sequence_from_slices(const std::vector<PartitionSlice>& fx, const std::vector<PartitionSlice>& fy,
                                      const TimeGrid& grid, double theta, const std::vector<int>& n_list,
                                      EndpointRule rule);

/// |ratio_xy - (ratio_xz + ratio_zy)| per common n.
std::vector<double> check_cocycle(const BusemannEstimate& xy, const BusemannEstimate& yz, const BusemannEstimate& xz);

struct ComparisonCase {
  enum class Kind { Vertical, Horizontal };
  Kind kind = Kind::Vertical;
  int n = 1;
  double s = 0.0;  // horizontal only
  double t = 1.0;  // vertical: endpoint t; horizontal: second base time
  double T = 2.0;  // horizontal only: endpoint
};

/// lower <= middle <= upper in log (or length) units.
struct ComparisonGaps {
  double lower = 0.0, middle = 0.0, upper = 0.0;
  double left_gap() const { return middle - lower; }
  double right_gap() const { return upper - middle; }
  bool holds(double eps = 1e-9) const { return left_gap() >= -eps && right_gap() >= -eps; }
};

/// Restricted point-to-line ratios around the point-to-point ratio, all on one
/// grid with one cutoff. Vertical: (0,0)/(1,0) to (n,t). Horizontal: (0,t)/(0,s) to (n,T).
ComparisonGaps check_comparison(EnvView env, const BoundaryWeight& boundary, const ComparisonCase& c,
                                const TruncationPolicy& policy);
/// Gaps for every level up to c.n (vertical from 1, horizontal from 0) with
/// the cutoff of level c.n shared by all of them.
std::vector<ComparisonGaps> check_comparison_levels(EnvView env, const BoundaryWeight& boundary,
                                                    const ComparisonCase& c, const TruncationPolicy& policy);

struct LimitReport {
  double theta = 0.0;
  double lambda_theta = 0.0;
  double t = 1.0;
  int n_star = 0;
  KsResult vertical_ks{};
  double vertical_shape_fit = 0.0;  // Gamma shape minimizing the KS distance
  double horizontal_mean = 0.0;
  double horizontal_se = 0.0;
  double horizontal_target = 0.0;
  KsResult horizontal_ks{};
  std::vector<double> vertical_samples;    // exp(-log ratio)
  std::vector<double> horizontal_samples;  // log ratio
};

struct LimitConfig {
  double theta = 0.0;
  std::size_t n_env = 500;
  int n_star = 64;
  double step = 0x1.0p-8;
  double t = 1.0;
  std::uint64_t seed = 1;
  int workers = 0;
};

LimitReport limiting_distribution_test(const LimitConfig& cfg);

/// Gamma shape in [lo, hi] minimizing the KS distance to the samples.
double fit_gamma_shape_ks(const std::vector<double>& samples, double lo = 0.05, double hi = 20.0);

/// Zbar(tau_n > n theta)/Zbar for theta < trigamma(lambda), Zbar(tau_n < n theta)/Zbar otherwise.
std::vector<double> dominant_slope_check(EnvView env, const BoundaryWeight& boundary, double theta,
                                         const std::vector<int>& n_list, const TruncationPolicy& policy);

}  // namespace oy
