#include "oy/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oy/lpp.hpp"
#include "oy/numerics.hpp"
#include "oy/parallel.hpp"
#include "oy/stats.hpp"

namespace oy {

double restricted_target(double lambda, double s, double t) {
  if (!(lambda > 0.0)) throw std::invalid_argument("restricted_target: lambda must be positive");
  if (!(s > 0.0 && s < t)) throw std::invalid_argument("restricted_target: need 0 < S < T");
  const double peak = trigamma(lambda);
  if (peak >= s && peak <= t) return -digamma(lambda);
  const double edge = peak < s ? s : t;
  return free_energy_p(edge).value - lambda * edge;
}

RestrictedFreeEnergyReport restricted_free_energy(const std::vector<Environment>& envs, double lambda, double S,
                                                  double T, const std::vector<int>& n_list,
                                                  const TruncationPolicy& policy, bool with_bar, int workers) {
  RestrictedFreeEnergyReport rep;
  rep.lambda = lambda;
  rep.S = S;
  rep.T = T;
  rep.n_list = n_list;
  rep.target = restricted_target(lambda, S, T);
  rep.values.assign(n_list.size(), std::vector<double>(envs.size()));
  parallel_for(envs.size(), workers, [&](std::size_t e) {
    const Environment& env = envs[e];
    for (std::size_t j = 0; j < n_list.size(); ++j) {
      const int n = n_list[j];
      const double lo = std::round(n * S / env.grid().step) * env.grid().step;
      Restriction r = Restriction::above(lo);
      if (std::isfinite(T)) r = Restriction::interval(lo, std::round(n * T / env.grid().step) * env.grid().step);
      const BoundaryWeight bw = with_bar ? BoundaryWeight::from(lambda, env) : BoundaryWeight::zero(lambda);
      const auto z = point_to_line_log_Zbar(env, bw, {0, 0.0}, n, r, policy);
      rep.values[j][e] = z.log_value / n;
    }
  });
  for (const auto& v : rep.values) {
    rep.mean.push_back(mean(v));
    rep.se.push_back(v.size() > 1 ? standard_error(v) : 0.0);
  }
  return rep;
}

BoundaryVariantReport unrestricted_variant(const std::vector<Environment>& envs, double lambda, double S, double T,
                                           const std::vector<int>& n_list, const TruncationPolicy& policy,
                                           int workers) {
  BoundaryVariantReport rep;
  rep.with_bar = restricted_free_energy(envs, lambda, S, T, n_list, policy, true, workers);
  rep.without_bar = restricted_free_energy(envs, lambda, S, T, n_list, policy, false, workers);
  rep.abs_difference.assign(n_list.size(), std::vector<double>(envs.size()));
  for (std::size_t j = 0; j < n_list.size(); ++j)
    for (std::size_t e = 0; e < envs.size(); ++e)
      rep.abs_difference[j][e] = std::abs(rep.with_bar.values[j][e] - rep.without_bar.values[j][e]);
  if (!envs.empty() && n_list.size() > 1) {
    std::size_t count = 0;
    for (std::size_t e = 0; e < envs.size(); ++e)
      if (rep.abs_difference.back()[e] < rep.abs_difference.front()[e]) ++count;
    rep.fraction_decreasing = static_cast<double>(count) / envs.size();
  }
  return rep;
}

MaximalEnergyBound maximal_energy_bound_check(EnvView env, int n, double x) {
  if (n < 1) throw std::invalid_argument("maximal_energy_bound_check: need n >= 1");
  const TimeGrid& g = env.grid();
  const std::size_t i0 = g.index(0.0), ix = g.index(x);
  const auto k = static_cast<double>(ix - i0);
  if (k < n) throw std::invalid_argument("maximal_energy_bound_check: x too small for n jumps on the grid");
  MaximalEnergyBound out;
  out.log_Z = point_to_point_log_Z(env, {0, 0.0}, {n, x});
  // the lattice max uses the same environment scaling as Z
  double L = kLogZero;
  {
    const auto rows = lpp_slices(env, {0, 0.0}, n, ix);
    L = rows.back().values[ix];
  }
  out.L = L;
  const double log_binom = std::lgamma(k + 1.0) - std::lgamma(n + 1.0) - std::lgamma(k - n + 1.0);
  out.lattice_bound = log_binom + n * std::log(g.step) + L;
  out.continuum_bound = n * std::log(x) - std::lgamma(n + 1.0) + L;
  return out;
}

std::vector<double> point_to_point_free_energy(const std::vector<Environment>& envs, int n, double theta,
                                               int workers) {
  std::vector<double> out(envs.size());
  parallel_for(envs.size(), workers, [&](std::size_t e) {
    const double t = std::round(n * theta / envs[e].grid().step) * envs[e].grid().step;
    out[e] = point_to_point_log_Z(envs[e], {0, 0.0}, {n, t}) / n;
  });
  return out;
}

double concavity_violation(double lambda, const std::vector<double>& t) {
  std::vector<double> ts = t;
  std::sort(ts.begin(), ts.end());
  double worst = -kUnbounded;
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    const double a = ts[i - 1], b = ts[i], c = ts[i + 1];
    auto h = [&](double u) { return free_energy_p(u).value - lambda * u; };
    // chord value at b minus h(b): positive means convex there
    const double chord = h(a) + (h(c) - h(a)) * (b - a) / (c - a);
    worst = std::max(worst, chord - h(b));
  }
  return worst;
}

}  // namespace oy
