#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace oy {

/// Natural logarithm of a nonnegative quantity; -inf encodes zero.
using LogValue = double;

inline constexpr LogValue kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_valid_log(LogValue v) { return !std::isnan(v) && v != std::numeric_limits<double>::infinity(); }

/// log(e^a + e^b), exact for -inf operands.
inline LogValue log_add(LogValue a, LogValue b) {
  if (a < b) std::swap(a, b);
  if (b == kLogZero) return a;
  return a + std::log1p(std::exp(b - a));
}

/// Stable log(sum exp(v)). Empty input gives -inf.
LogValue log_sum_exp(std::span<const LogValue> values);

// Polygamma functions. Arguments are shifted by recurrence to x >= 8 and
// finished with a six-term Bernoulli asymptotic series. Throw
// std::domain_error for x <= 0.
double digamma(double x);
double trigamma(double x);
double tetragamma(double x);

/// Solves trigamma(lambda) = theta for lambda > 0 (safeguarded Newton).
double inverse_trigamma(double theta);

struct FreeEnergy {
  double value;   ///< p(t) = inf_l { l t - digamma(l) }
  double lambda;  ///< minimizer, trigamma(lambda) = t
};

/// Point-to-point free energy of the polymer along slope t.
FreeEnergy free_energy_p(double t);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

}  // namespace oy
