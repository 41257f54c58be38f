#include "oy/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oy/numerics.hpp"

namespace oy {

DistributionSpec DistributionSpec::gamma(double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be positive");
  return {Kind::Gamma, shape, 0.0};
}

DistributionSpec DistributionSpec::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
  return {Kind::Exponential, rate, 0.0};
}

DistributionSpec DistributionSpec::normal(double mean, double variance) {
  if (!(variance >= 0.0)) throw std::invalid_argument("normal variance must be nonnegative");
  return {Kind::Normal, mean, variance};
}

double DistributionSpec::cdf(double x) const {
  switch (kind) {
    case Kind::Gamma:
      return regularized_gamma_p(a, x);
    case Kind::Exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-a * x);
    case Kind::Normal:
      if (b == 0.0) return x < a ? 0.0 : 1.0;
      return 0.5 * std::erfc(-(x - a) / std::sqrt(2.0 * b));
  }
  return 0.0;
}

KsResult ks_statistic(std::span<const double> samples, const DistributionSpec& dist) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = dist.cdf(s[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, 1.628 / std::sqrt(n), s.size()};
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / v.size();
}

double variance(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / (v.size() - 1);
}

double standard_error(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  return std::sqrt(variance(v) / v.size());
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("correlation: size mismatch");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

ChiSquareResult chi_square(std::span<const double> observed, std::span<const double> expected,
                           double min_expected) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square: size mismatch");
  // pool small bins left to right
  std::vector<double> obs, exp;
  double o = 0, e = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += observed[i];
    e += expected[i];
    if (e >= min_expected) {
      obs.push_back(o);
      exp.push_back(e);
      o = e = 0;
    }
  }
  if (e > 0 || o > 0) {
    if (exp.empty()) {
      obs.push_back(o);
      exp.push_back(e);
    } else {
      obs.back() += o;
      exp.back() += e;
    }
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i)
    if (exp[i] > 0) stat += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  const int dof = std::max<int>(1, static_cast<int>(obs.size()) - 1);
  return {stat, dof, regularized_gamma_q(0.5 * dof, 0.5 * stat)};
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need two points");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace oy
