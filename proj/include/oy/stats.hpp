#pragma once

#include <span>
#include <vector>

namespace oy {

struct DistributionSpec {
  enum class Kind { Gamma, Exponential, Normal };
  Kind kind;
  double a;  // Gamma shape, Exponential rate, Normal mean
  double b;  // Normal variance; unused otherwise

  static DistributionSpec gamma(double shape);  // rate 1
  static DistributionSpec exponential(double rate);
  static DistributionSpec normal(double mean, double variance);

  double cdf(double x) const;
};

struct KsResult {
  double statistic;
  double critical;  // alpha = 0.01 asymptotic
  std::size_t n;
  bool passed() const { return statistic < critical; }
};

KsResult ks_statistic(std::span<const double> samples, const DistributionSpec& dist);

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // unbiased
double standard_error(std::span<const double> v);
double correlation(std::span<const double> x, std::span<const double> y);

struct ChiSquareResult {
  double statistic;
  int dof;
  double p_value;
};

/// Pearson chi-square of observed counts against expected counts.
/// Bins with expected < min_expected are pooled into their neighbour.
ChiSquareResult chi_square(std::span<const double> observed, std::span<const double> expected,
                           double min_expected = 5.0);

/// Least-squares slope of y on x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace oy
