#include "oy/numerics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace oy {

LogValue log_sum_exp(std::span<const LogValue> values) {
  if (values.empty()) return kLogZero;
  const LogValue hi = *std::max_element(values.begin(), values.end());
  if (hi == kLogZero) return kLogZero;
  double acc = 0.0;
  for (LogValue v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

namespace {

constexpr double kShiftTo = 8.0;

void require_positive(double x, const char* name) {
  if (!(x > 0.0)) throw std::domain_error(std::string(name) + ": argument must be positive, got " + std::to_string(x));
}

}  // namespace

double digamma(double x) {
  require_positive(x, "digamma");
  double result = 0.0;
  while (x < kShiftTo) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  // B2/2, B4/4, ..., B12/12
  const double series =
      r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760))))));
  return result + std::log(x) - 0.5 / x - series;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double result = 0.0;
  while (x < kShiftTo) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  const double series =
      r * (1.0 / 6 - r * (1.0 / 30 - r * (1.0 / 42 - r * (1.0 / 30 - r * (5.0 / 66 - r * (691.0 / 2730))))));
  return result + 1.0 / x + 0.5 * r + series / x;
}

double tetragamma(double x) {
  require_positive(x, "tetragamma");
  double result = 0.0;
  while (x < kShiftTo) {
    result -= 2.0 / (x * x * x);
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  const double series =
      r * (0.5 - r * (1.0 / 6 - r * (1.0 / 6 - r * (3.0 / 10 - r * (5.0 / 6 - r * (691.0 / 210))))));
  return result - r - r / x - series * r;
}

double inverse_trigamma(double theta) {
  require_positive(theta, "inverse_trigamma");
  // trigamma(l) ~ 1/l^2 as l -> 0 and ~ 1/l + 1/(2 l^2) as l -> inf
  double guess = theta >= 6.0 ? 1.0 / std::sqrt(theta) : 1.0 / theta + 0.5;
  double lo = guess, hi = guess;
  while (trigamma(lo) <= theta) lo *= 0.5;
  while (trigamma(hi) >= theta) hi *= 2.0;

  double x = std::clamp(guess, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = trigamma(x) - theta;
    if (std::abs(f) <= 1e-15 * theta) break;
    if (f > 0.0) lo = x; else hi = x;
    double next = x - f / tetragamma(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * x) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

FreeEnergy free_energy_p(double t) {
  if (!(t > 0.0)) throw std::domain_error("free_energy_p: slope must be positive");
  const double lambda = inverse_trigamma(t);
  return {lambda * t - digamma(lambda), lambda};
}

namespace {

double gamma_series(double a, double x) {
  double sum = 1.0 / a, term = sum, ap = a;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("regularized_gamma_p: shape must be positive");
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("regularized_gamma_q: shape must be positive");
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

}  // namespace oy
