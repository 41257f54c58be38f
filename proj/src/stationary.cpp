#include "oy/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oy/parallel.hpp"
#include "oy/rng.hpp"

namespace oy {

StationaryFields build_stationary_fields(const Environment& env, double lambda, int n_max, double horizon) {
  if (!(lambda > 0.0)) throw std::invalid_argument("stationary: lambda must be positive");
  if (n_max < 1) throw std::invalid_argument("stationary: need n_max >= 1");
  if (!(horizon > 0.0)) horizon = default_horizon(lambda);
  for (int k = 0; k <= n_max; ++k)
    if (!env.has_level(k)) throw std::out_of_range("stationary: environment lacks level " + std::to_string(k));

  const TimeGrid& g = env.grid();
  const auto start = static_cast<std::size_t>(std::ceil(horizon / g.step - 1e-9));
  if (start >= g.n_points - 1) {
    std::ostringstream msg;
    msg << "stationary: horizon " << horizon << " leaves no evaluation window on grid [" << g.t_min << ", "
        << g.t_max << "]";
    throw GridError(msg.str());
  }

  StationaryFields f;
  f.lambda = lambda;
  f.n_max = n_max;
  f.horizon = horizon;
  f.grid = g;
  f.window_start = start;
  const std::size_t n = g.n_points;
  const double log_step = std::log(g.step);

  f.log_Z.assign(n_max + 1, std::vector<LogValue>(n, kLogZero));
  f.r.assign(n_max + 1, {});
  f.g.assign(n_max + 1, std::vector<double>(n, 0.0));

  for (std::size_t x = 0; x < n; ++x) {
    f.log_Z[0][x] = -env.value(0, x);
    f.g[0][x] = env.value(0, x);
  }
  for (int level = 1; level <= n_max; ++level) {
    const auto& prev = f.log_Z[level - 1];
    auto& cur = f.log_Z[level];
    // Z~_N(T) = e^{B_N(T) - lambda T} sum_{u < T} step e^{-B_N(u) + lambda u} Z~_{N-1}(u)
    LogValue acc = kLogZero;
    for (std::size_t x = 1; x < n; ++x) {
      const std::size_t u = x - 1;
      acc = log_add(acc, prev[u] - env.value(level, u) + lambda * g.time(u) + log_step);
      cur[x] = env.value(level, x) - lambda * g.time(x) + acc;
    }
    auto& r = f.r[level];
    r.assign(n, 0.0);
    for (std::size_t x = 1; x < n; ++x) r[x] = cur[x] - prev[x];
    for (std::size_t x = 0; x < n; ++x) f.g[level][x] = f.g[level - 1][x] - r[x];
  }

  const TimeGrid win(g.time(start), g.end(), g.step);
  std::vector<std::vector<double>> check(n_max), minus_g(n_max + 1);
  for (int level = 1; level <= n_max; ++level) {
    auto& p = check[level - 1];
    p.resize(win.n_points);
    for (std::size_t x = 0; x < win.n_points; ++x) p[x] = env.value(level, start + x) - f.r[level][start + x];
  }
  for (int level = 0; level <= n_max; ++level) {
    auto& p = minus_g[level];
    p.resize(win.n_points);
    for (std::size_t x = 0; x < win.n_points; ++x) p[x] = -f.g[level][start + x];
  }
  f.check_B = Environment::from_paths(win, 0, std::move(check), env.seed());
  f.minus_g = Environment::from_paths(win, 0, std::move(minus_g), env.seed());
  return f;
}

double r_from_g(const Environment& env, const StationaryFields& f, int n, double t) {
  if (n < 1 || n > f.n_max) throw std::out_of_range("r_from_g: level outside fields");
  const TimeGrid& g = f.grid;
  const std::size_t x = g.index(t);
  if (x < f.window_start) throw GridError("r_from_g: time before the stationary window");
  const double log_step = std::log(g.step);
  std::vector<LogValue> terms;
  terms.reserve(x);
  for (std::size_t u = 0; u < x; ++u) {
    const double b = env.value(n, x) - env.value(n, u);
    const double gg = f.g[n - 1][x] - f.g[n - 1][u];
    terms.push_back(b + gg - f.lambda * (g.time(x) - g.time(u)) + log_step);
  }
  return log_sum_exp(terms);
}

InvolutionResult check_involution(const StationaryFields& f, int n, double t, double forward_horizon,
                                  double threshold) {
  if (n < 1 || n > f.n_max) throw std::out_of_range("check_involution: level outside fields");
  const TimeGrid& g = f.grid;
  const std::size_t x = g.index(t);
  if (x < f.window_start) throw GridError("check_involution: time before the stationary window");
  const double end_time = t + forward_horizon;
  if (end_time > g.end() + 1e-9 * g.step) {
    std::ostringstream msg;
    msg << "check_involution: grid ends at " << g.end() << " but the forward horizon needs " << end_time;
    throw GridError(msg.str());
  }
  const auto end = static_cast<std::size_t>(std::floor((end_time - g.t_min) / g.step + 1e-9));
  const auto decade = x + static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(end - x)));
  const double log_step = std::log(g.step);
  // Bcheck_{N-1}(T,s) = B_N(T,s) - r_N(T,s) on the window
  const Environment& ck = f.check_B;
  const Environment& mg = f.minus_g;
  const std::size_t w = f.window_start;
  LogValue total = kLogZero, tail = kLogZero;
  for (std::size_t s = x; s <= end; ++s) {
    const double bc = ck.value(n - 1, s - w) - ck.value(n - 1, x - w);
    const double gg = -(mg.value(n, s - w) - mg.value(n, x - w));
    const double term = bc + gg + f.lambda * (g.time(x) - g.time(s)) + log_step;
    total = log_add(total, term);
    if (s >= decade) tail = log_add(tail, term);
  }
  InvolutionResult out;
  out.lhs = f.r[n][x];
  out.rhs = total;
  out.residual = std::abs(out.lhs - out.rhs);
  out.tail_log_fraction = tail - total;
  if (out.tail_log_fraction > std::log(threshold)) {
    std::ostringstream msg;
    msg << "check_involution: forward horizon " << forward_horizon << " leaves mass fraction "
        << std::exp(out.tail_log_fraction) << " in its last decade";
    throw TruncationError(msg.str());
  }
  return out;
}

double RatioResiduals::max_abs() const {
  double m = 0.0;
  for (double v : horizontal) m = std::max(m, std::abs(v));
  for (double v : vertical) m = std::max(m, std::abs(v));
  return m;
}

RatioResiduals check_stationary_ratio(const Environment& env, const StationaryFields& f,
                                      const std::vector<int>& n_list, double s, double t,
                                      const TruncationPolicy& policy) {
  if (!(s < t)) throw std::invalid_argument("check_stationary_ratio: need s < t");
  const TimeGrid& g = f.grid;
  const std::size_t is = g.index(s), it = g.index(t);
  if (is < f.window_start) throw GridError("check_stationary_ratio: s before the stationary window");
  const BoundaryWeight bw = BoundaryWeight::from(f.lambda, f.minus_g);
  RatioResiduals out;
  out.n_list = n_list;
  const double horizontal_target = (env.value(0, it) - env.value(0, is)) - f.lambda * (t - s);
  const double vertical_target = f.r[1][it];
  for (int n : n_list) {
    if (n < 1 || n + 1 > f.n_max) throw std::out_of_range("check_stationary_ratio: N must satisfy 1 <= N < n_max");
    TruncationPolicy p = policy;
    if (!p.cutoff) p.cutoff = polymer_cutoff({0, s}, n, f.lambda, policy.kappa);
    const auto zt = point_to_line_log_Zbar(f.check_B, bw, {0, t}, n - 1, Restriction::none(), p);
    const auto zs = point_to_line_log_Zbar(f.check_B, bw, {0, s}, n - 1, Restriction::none(), p);
    out.horizontal.push_back(zt.log_value - zs.log_value - horizontal_target);
    TruncationPolicy pv = policy;
    if (!pv.cutoff) pv.cutoff = polymer_cutoff({0, t}, n, f.lambda, policy.kappa);
    const auto z0 = point_to_line_log_Zbar(f.check_B, bw, {0, t}, n, Restriction::none(), pv);
    const auto z1 = point_to_line_log_Zbar(f.check_B, bw, {1, t}, n, Restriction::none(), pv);
    out.vertical.push_back(z0.log_value - z1.log_value - vertical_target);
  }
  auto spread = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  out.horizontal_spread = spread(out.horizontal);
  out.vertical_spread = spread(out.vertical);
  return out;
}

ExactResiduals check_exact_identities(const Environment& env, const StationaryFields& f) {
  ExactResiduals out;
  const std::size_t n = f.grid.n_points, w = f.window_start;
  for (std::size_t x = w; x < n; ++x) {
    out.g_recursion = std::max(out.g_recursion, std::abs(f.g[0][x] - env.value(0, x)));
    double sum_r = 0.0;
    for (int level = 1; level <= f.n_max; ++level) {
      sum_r += f.r[level][x];
      // g_N(S,T) = g_{N-1}(S,T) - r_N(S,T) with S = window start
      const double lhs = f.g[level][x] - f.g[level][w];
      const double rhs = (f.g[level - 1][x] - f.g[level - 1][w]) - (f.r[level][x] - f.r[level][w]);
      out.g_recursion = std::max(out.g_recursion, std::abs(lhs - rhs));
      const double ck = f.check_B.value(level - 1, x - w) - f.check_B.value(level - 1, 0);
      const double def = (env.value(level, x) - env.value(level, w)) - (f.r[level][x] - f.r[level][w]);
      out.check_definition = std::max(out.check_definition, std::abs(ck - def));
      out.telescoping = std::max(out.telescoping, std::abs(sum_r - (f.log_Z[level][x] + env.value(0, x))));
    }
  }
  return out;
}

BurkeReport burke_tests(const BurkeConfig& cfg) {
  if (cfg.n_env < 500) throw std::invalid_argument("burke_tests: need n_env >= 500");
  const double horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(cfg.lambda);
  const int n_max = std::max(2, *std::max_element(cfg.check_levels.begin(), cfg.check_levels.end()) + 1);
  // grid from -(horizon + 1 + |t2|) to t_after, aligned to the step
  const double back = std::ceil((horizon + 1.0 - cfg.t2) / cfg.step) * cfg.step;
  const double fwd = std::ceil(cfg.t_after / cfg.step) * cfg.step;
  const TimeGrid grid(-back, fwd, cfg.step);

  const std::size_t n_env = cfg.n_env;
  const std::size_t n_check = cfg.check_levels.size();
  std::vector<double> gamma_samples(n_env);
  std::vector<std::vector<double>> check_samples(n_check, std::vector<double>(n_env));
  // staircase t_2 <= t_1 = 0 variables
  const std::vector<std::string> names = {"r1(t1)",          "r2(t2)",           "g1(t2,t1)",      "Bcheck0(t1-1,t1)",
                                          "Bcheck1(t2-1,t2)", "B1(t1,t1+1)",      "g2(t2-1,t2)",    "B2(t2,t2+1)"};
  std::vector<std::vector<double>> stair(names.size(), std::vector<double>(n_env));

  parallel_for(n_env, cfg.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(cfg.seed, e), grid, 0, n_max);
    const StationaryFields f = build_stationary_fields(env, cfg.lambda, n_max, horizon);
    const std::size_t z = grid.index(0.0), t2 = grid.index(cfg.t2);
    const auto one = static_cast<std::size_t>(std::llround(1.0 / grid.step));
    const std::size_t w = f.window_start;
    gamma_samples[e] = std::exp(-f.r[1][z]);
    for (std::size_t c = 0; c < n_check; ++c) {
      const int level = cfg.check_levels[c];
      check_samples[c][e] = f.check_B.value(level, z - w) - f.check_B.value(level, z - one - w);
    }
    stair[0][e] = f.r[1][z];
    stair[1][e] = f.r[2][t2];
    stair[2][e] = f.g[1][z] - f.g[1][t2];
    stair[3][e] = f.check_B.value(0, z - w) - f.check_B.value(0, z - one - w);
    stair[4][e] = f.check_B.value(1, t2 - w) - f.check_B.value(1, t2 - one - w);
    stair[5][e] = env.value(1, z + one) - env.value(1, z);
    stair[6][e] = f.g[2][t2] - f.g[2][t2 - one];
    stair[7][e] = env.value(2, t2 + one) - env.value(2, t2);
  });

  BurkeReport rep;
  rep.lambda = cfg.lambda;
  rep.n_env = n_env;
  rep.gamma_ks = ks_statistic(gamma_samples, DistributionSpec::gamma(cfg.lambda));
  rep.gamma_mean = mean(gamma_samples);
  rep.gamma_mean_se = standard_error(gamma_samples);
  rep.check_levels = cfg.check_levels;
  for (std::size_t c = 0; c < n_check; ++c)
    rep.check_ks.push_back(ks_statistic(check_samples[c], DistributionSpec::normal(0.0, 1.0)));
  const double band = 3.0 / std::sqrt(static_cast<double>(n_env));
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      rep.correlations.push_back({names[i], names[j], correlation(stair[i], stair[j]), band});
  rep.samples = std::move(gamma_samples);
  return rep;
}

}  // namespace oy
