#pragma once
// Independent reference computations for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "oy/environment.hpp"
#include "oy/partition.hpp"

namespace oracle {

// Visits every jump-index tuple s_idx <= x_m < ... < x_{n-1} < t_idx.
inline void for_each_tuple(std::size_t s_idx, std::size_t t_idx, int jumps,
                           const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> x(jumps);
  std::function<void(int, std::size_t)> rec = [&](int j, std::size_t lo) {
    if (j == jumps) {
      visit(x);
      return;
    }
    for (std::size_t u = lo; u < t_idx; ++u) {
      x[j] = u;
      rec(j + 1, u + 1);
    }
  };
  rec(0, s_idx);
}

// sum_k B_k(tau_{k-1}, tau_k) with tau_{m-1} = s, tau_n = t
inline double energy(const oy::Environment& env, int m, std::size_t s_idx, std::size_t t_idx,
                     const std::vector<std::size_t>& x) {
  double e = 0.0;
  std::size_t prev = s_idx;
  for (std::size_t j = 0; j < x.size(); ++j) {
    e += env.value(m + static_cast<int>(j), x[j]) - env.value(m + static_cast<int>(j), prev);
    prev = x[j];
  }
  const int n = m + static_cast<int>(x.size());
  return e + env.value(n, t_idx) - env.value(n, prev);
}

inline double brute_log_Z(const oy::Environment& env, oy::Point from, oy::Point to) {
  const auto& g = env.grid();
  const std::size_t s = g.index(from.time), t = g.index(to.time);
  if (from.level == to.level) return env.value(to.level, t) - env.value(from.level, s);
  double top = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  for_each_tuple(s, t, to.level - from.level, [&](const std::vector<std::size_t>& x) {
    terms.push_back(energy(env, from.level, s, t, x));
    top = std::max(top, terms.back());
  });
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double e : terms) sum += std::exp(e - top);
  return top + std::log(sum) + (to.level - from.level) * std::log(g.step);
}

inline double brute_L(const oy::Environment& env, oy::Point from, oy::Point to) {
  const auto& g = env.grid();
  const std::size_t s = g.index(from.time), t = g.index(to.time);
  if (from.level == to.level) return env.value(to.level, t) - env.value(from.level, s);
  double best = -std::numeric_limits<double>::infinity();
  for_each_tuple(s, t, to.level - from.level,
                 [&](const std::vector<std::size_t>& x) { best = std::max(best, energy(env, from.level, s, t, x)); });
  return best;
}

// P(tau_k = x) by summing the Gibbs weights over the simplex.
inline std::vector<double> brute_marginal(const oy::Environment& env, oy::Point from, oy::Point to, int k) {
  const auto& g = env.grid();
  const std::size_t s = g.index(from.time), t = g.index(to.time);
  std::vector<double> w(g.n_points, 0.0);
  double total = 0.0;
  for_each_tuple(s, t, to.level - from.level, [&](const std::vector<std::size_t>& x) {
    const double v = std::exp(energy(env, from.level, s, t, x));
    w[x[k - from.level]] += v;
    total += v;
  });
  for (double& v : w) v /= total;
  return w;
}

// sum_{k>=0} 1/(x+k)^2 with an integral tail estimate
inline double trigamma_series(double x) {
  double s = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) s += 1.0 / ((x + k) * (x + k));
  const double y = x + n;
  return s + 1.0 / y + 0.5 / (y * y) + 1.0 / (6.0 * y * y * y);
}

// golden-section minimization of f on [a, b]
template <class F>
double golden_min(F f, double a, double b, int iters = 200) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < iters; ++i) {
    if (f(c) < f(d)) b = d; else a = c;
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return f(0.5 * (a + b));
}

// sup_x |F_n(x) - F(x)| computed from the sorted sample by hand
template <class Cdf>
double ks_by_hand(std::vector<double> v, Cdf cdf) {
  std::sort(v.begin(), v.end());
  double d = 0.0;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace oracle
