#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oy/environment.hpp"
#include "oy/numerics.hpp"
#include "oy/partition.hpp"
#include "oy/stats.hpp"

namespace oy {

inline double default_horizon(double lambda) { return 30.0 / lambda + 10.0 * std::sqrt(30.0 / lambda); }

/// Stationary boundary model on the grid of the source environment.
/// log_Z[N], g[N] for N = 0..n_max; r[N] for N = 1..n_max (r[0] is empty).
/// Values are meaningful from window_start on, where at least `horizon` of
/// past has been integrated.
struct StationaryFields {
  double lambda = 1.0;
  int n_max = 0;
  double horizon = 0.0;
  TimeGrid grid;
  std::size_t window_start = 0;
  std::vector<std::vector<LogValue>> log_Z;
  std::vector<std::vector<double>> r;
  std::vector<std::vector<double>> g;

  /// Bcheck_{N-1} = B_N - r_N as an environment on [window start, grid end], levels 0..n_max-1.
  Environment check_B;
  /// Levels 0..n_max holding -g_N on the same window: the boundary field Bbar = -g.
  Environment minus_g;

  double window_begin() const { return grid.time(window_start); }
};

/// Z~_N(T) = sum_{u in [t_min, T)} step e^{B_N(u,T)} Z~_{N-1}(u) e^{-lambda (T-u)}, Z~_0 = e^{-B_0}.
/// Uses the whole available past; the grid must reach at least `horizon`
/// before the evaluation window.
StationaryFields build_stationary_fields(const Environment& env, double lambda, int n_max, double horizon);

/// r_N(T) recomputed from B_N and g_{N-1}.
double r_from_g(const Environment& env, const StationaryFields& f, int n, double t);

struct InvolutionResult {
  double lhs = 0.0;  // r_N(T)
  double rhs = 0.0;  // log sum_{s >= T} step e^{Bcheck_{N-1}(T,s) + g_N(T,s) + lambda (T-s)}
  double residual = 0.0;
  LogValue tail_log_fraction = kLogZero;
};

InvolutionResult check_involution(const StationaryFields& f, int n, double t, double forward_horizon,
                                  double threshold = 1e-3);

struct RatioResiduals {
  std::vector<int> n_list;
  std::vector<double> horizontal;  // log ratio - (B_0(s,t) - lambda (t-s)), per N
  std::vector<double> vertical;    // log ratio - r_1(t), per N
  double horizontal_spread = 0.0;  // max - min over N
  double vertical_spread = 0.0;
  double max_abs() const;
};

/// Both stationary ratio identities evaluated on (Bcheck, -g) for each N.
RatioResiduals check_stationary_ratio(const Environment& env, const StationaryFields& f, const std::vector<int>& n_list,
                                      double s, double t, const TruncationPolicy& policy);

struct ExactResiduals {
  double g_recursion = 0.0;
  double check_definition = 0.0;
  double telescoping = 0.0;
};

/// Algebraic identities of the stored fields over the window.
ExactResiduals check_exact_identities(const Environment& env, const StationaryFields& f);

struct CorrelationRecord {
  std::string a, b;
  double value;
  double band;
  bool passed() const { return std::abs(value) <= band; }
};

struct BurkeReport {
  double lambda = 1.0;
  std::size_t n_env = 0;
  KsResult gamma_ks{};            // e^{-r_1(0)} vs Gamma(lambda, 1)
  double gamma_mean = 0.0;
  double gamma_mean_se = 0.0;
  std::vector<KsResult> check_ks;   // Bcheck_N(t-1, t)/1 vs Normal(0,1), one per N in n_list
  std::vector<int> check_levels;
  std::vector<CorrelationRecord> correlations;
  std::vector<double> samples;  // e^{-r_1(0)} per environment
};

struct BurkeConfig {
  double lambda = 1.0;
  std::size_t n_env = 1000;
  double step = 0x1.0p-8;
  double horizon = 0.0;  // 0 means default
  double t_after = 4.0;  // grid extends this far past 0
  std::vector<int> check_levels{0, 1};
  double t2 = -1.0;  // staircase: t_2 <= t_1 = 0
  std::uint64_t seed = 1;
  int workers = 0;
};

BurkeReport burke_tests(const BurkeConfig& cfg);

}  // namespace oy
