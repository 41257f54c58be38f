#include "oy/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oy/parallel.hpp"
#include "oy/rng.hpp"
#include "oy/stats.hpp"

namespace oy {

namespace {

void check_levels(EnvView env, int lo, int hi) {
  for (int k = lo; k <= hi; ++k)
    if (!env.has_level(k)) throw std::out_of_range("environment lacks level " + std::to_string(k));
}

std::size_t index_at_or_before(const TimeGrid& g, double t) {
  const double c = std::min(t, g.end());
  return static_cast<std::size_t>(std::floor((c - g.t_min) / g.step + 1e-9));
}

}  // namespace

std::vector<LppSlice> lpp_slices(EnvView env, Point base, int n_max, std::size_t end_index) {
  if (n_max < base.level) throw std::invalid_argument("lpp_slices: n_max below base level");
  check_levels(env, base.level, n_max);
  const TimeGrid& g = env.grid();
  const std::size_t i0 = g.index(base.time);
  const std::size_t end = std::min(end_index, g.n_points - 1);

  std::vector<LppSlice> rows;
  LppSlice first{base.level, base, i0, std::vector<double>(g.n_points, kLogZero)};
  for (std::size_t x = i0; x <= end; ++x) first.values[x] = env.value(base.level, x) - env.value(base.level, i0);
  rows.push_back(std::move(first));
  for (int k = base.level + 1; k <= n_max; ++k) {
    const auto& prev = rows.back().values;
    LppSlice row{k, base, i0, std::vector<double>(g.n_points, kLogZero)};
    double best = kLogZero;
    for (std::size_t x = i0 + 1; x <= end; ++x) {
      best = std::max(best, prev[x - 1] - env.value(k, x - 1));
      row.values[x] = best == kLogZero ? kLogZero : env.value(k, x) + best;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LppSlice> lpp_slices_naive(EnvView env, Point base, int n_max, std::size_t end_index) {
  if (n_max < base.level) throw std::invalid_argument("lpp_slices_naive: n_max below base level");
  check_levels(env, base.level, n_max);
  const TimeGrid& g = env.grid();
  const std::size_t i0 = g.index(base.time);
  const std::size_t end = std::min(end_index, g.n_points - 1);

  std::vector<LppSlice> rows;
  LppSlice first{base.level, base, i0, std::vector<double>(g.n_points, kLogZero)};
  for (std::size_t x = i0; x <= end; ++x) first.values[x] = env.value(base.level, x) - env.value(base.level, i0);
  rows.push_back(std::move(first));
  for (int k = base.level + 1; k <= n_max; ++k) {
    const auto& prev = rows.back().values;
    LppSlice row{k, base, i0, std::vector<double>(g.n_points, kLogZero)};
    for (std::size_t x = i0 + 1; x <= end; ++x) {
      double best = kLogZero;
      for (std::size_t u = i0; u < x; ++u)
        if (prev[u] != kLogZero) best = std::max(best, prev[u] + (env.value(k, x) - env.value(k, u)));
      row.values[x] = best;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double last_passage(EnvView env, Point from, Point to) {
  const TimeGrid& g = env.grid();
  const std::size_t a = g.index(from.time), b = g.index(to.time);
  if (to.level < from.level || b < a) {
    std::ostringstream msg;
    msg << "last_passage: (" << from.level << "," << from.time << ") is not <= (" << to.level << "," << to.time
        << ")";
    throw std::invalid_argument(msg.str());
  }
  if (from.level == to.level) {
    check_levels(env, from.level, from.level);
    return env.value(from.level, b) - env.value(from.level, a);
  }
  return lpp_slices(env, from, to.level, b).back().values[b];
}

double lpp_cutoff(Point base, int n, double lambda, double kappa) {
  return base.time + kappa * (n - base.level + 1) / (lambda * lambda);
}

LbarResult point_to_line_L_from_slice(const LppSlice& slice, const TimeGrid& g, const BoundaryWeight& boundary,
                                      Restriction r, double cutoff, double threshold) {
  if (!(boundary.lambda > 0.0)) throw std::invalid_argument("point-to-line: lambda must be positive");
  const std::size_t i0 = slice.base_index;
  const double cut_time = std::min(cutoff, g.end());
  const std::size_t cut = index_at_or_before(g, cut_time);
  std::size_t lo = i0, hi = cut;
  bool truncated = true;
  switch (r.kind) {
    case Restriction::Kind::None:
      break;
    case Restriction::Kind::Below: {
      const std::size_t t = g.index(r.hi);
      if (t == 0) return {kLogZero, cut_time, kLogZero};
      if (t - 1 < cut) {
        hi = t - 1;
        truncated = false;
      }
      break;
    }
    case Restriction::Kind::Above:
      lo = std::max(lo, g.index(r.lo));
      break;
    case Restriction::Kind::Interval: {
      lo = std::max(lo, g.index(r.lo));
      const std::size_t t = g.index(r.hi);
      if (t < cut) {
        hi = t;
        truncated = false;
      }
      break;
    }
  }
  if (lo > hi) return {kLogZero, cut_time, kLogZero};
  const int bar_level = slice.level + 1;
  const auto decade = static_cast<std::size_t>(i0 + std::floor(0.9 * static_cast<double>(cut - i0)));
  double best = kLogZero, tail = kLogZero;
  for (std::size_t x = lo; x <= hi; ++x) {
    const double v = slice.values[x];
    if (v == kLogZero) continue;
    const double term = v - boundary.bar(bar_level, x) - boundary.lambda * g.time(x);
    best = std::max(best, term);
    if (truncated && x >= decade) tail = std::max(tail, term);
  }
  LbarResult out{best, cut_time, best == kLogZero ? kLogZero : tail - best};
  if (truncated && out.tail_gap > std::log(threshold)) {
    std::ostringstream msg;
    msg << "point-to-line passage time truncated at x=" << cut_time << " has a near-maximal term in its last decade"
        << " (gap " << out.tail_gap << ", allowed " << std::log(threshold) << ")";
    throw TruncationError(msg.str());
  }
  return out;
}

LbarResult point_to_line_L(EnvView env, const BoundaryWeight& boundary, Point base, int n, Restriction restriction,
                           const TruncationPolicy& policy) {
  if (n < base.level) throw std::invalid_argument("point-to-line: n below base level");
  if (boundary.field && !boundary.field->grid().same_as(env.grid()))
    throw GridError("boundary field grid differs from environment grid");
  const TimeGrid& g = env.grid();
  const double cutoff = policy.cutoff ? *policy.cutoff : lpp_cutoff(base, n, boundary.lambda, policy.kappa);
  const auto rows = lpp_slices(env, base, n, index_at_or_before(g, cutoff));
  return point_to_line_L_from_slice(rows.back(), g, boundary, restriction, cutoff, policy.threshold);
}

LppStationaryFields build_lpp_stationary_fields(const Environment& env, double lambda, int n_max, double horizon) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lpp stationary: lambda must be positive");
  if (n_max < 1) throw std::invalid_argument("lpp stationary: need n_max >= 1");
  if (!(horizon > 0.0)) horizon = default_horizon(lambda);
  for (int k = 0; k <= n_max; ++k)
    if (!env.has_level(k)) throw std::out_of_range("lpp stationary: environment lacks level " + std::to_string(k));
  const TimeGrid& g = env.grid();
  const auto start = static_cast<std::size_t>(std::ceil(horizon / g.step - 1e-9));
  if (start >= g.n_points - 1 || !g.contains(0.0) || g.index(0.0) < start) {
    std::ostringstream msg;
    msg << "lpp stationary: grid [" << g.t_min << ", " << g.t_max << "] must contain 0 at least " << horizon
        << " after its start";
    throw GridError(msg.str());
  }
  LppStationaryFields f;
  f.lambda = lambda;
  f.n_max = n_max;
  f.horizon = horizon;
  f.grid = g;
  f.window_start = start;
  const std::size_t n = g.n_points, z = g.index(0.0);
  f.q.assign(n_max + 1, {});
  f.f.assign(n_max + 1, std::vector<double>(n, 0.0));
  for (std::size_t x = 0; x < n; ++x) f.f[0][x] = env.value(0, x);
  const double drift = lambda * g.step;
  for (int level = 1; level <= n_max; ++level) {
    auto& q = f.q[level];
    q.assign(n, 0.0);
    const auto& fp = f.f[level - 1];
    // Lindley: q(T) = max(0, q(T - step) + B_N(T - step, T) + f_{N-1}(T - step, T) - lambda step)
    for (std::size_t x = 1; x < n; ++x) {
      const double inc = (env.value(level, x) - env.value(level, x - 1)) + (fp[x] - fp[x - 1]) - drift;
      q[x] = std::max(0.0, q[x - 1] + inc);
    }
    for (std::size_t x = 0; x < n; ++x) f.f[level][x] = fp[x] + q[z] - q[x];
  }
  const TimeGrid win(g.time(start), g.end(), g.step);
  std::vector<std::vector<double>> tilde(n_max), minus_f(n_max + 1);
  for (int level = 1; level <= n_max; ++level) {
    auto& p = tilde[level - 1];
    p.resize(win.n_points);
    for (std::size_t x = 0; x < win.n_points; ++x) p[x] = env.value(level, start + x) - f.q[level][start + x];
  }
  for (int level = 0; level <= n_max; ++level) {
    auto& p = minus_f[level];
    p.resize(win.n_points);
    for (std::size_t x = 0; x < win.n_points; ++x) p[x] = -f.f[level][start + x];
  }
  f.tilde_B = Environment::from_paths(win, 0, std::move(tilde), env.seed());
  f.minus_f = Environment::from_paths(win, 0, std::move(minus_f), env.seed());
  return f;
}

LppExactResiduals check_lpp_exact_identities(const Environment& env, const LppStationaryFields& f) {
  LppExactResiduals out;
  const std::size_t n = f.grid.n_points, w = f.window_start, z = f.grid.index(0.0);
  for (std::size_t x = w; x < n; ++x) {
    out.f_recursion = std::max(out.f_recursion, std::abs(f.f[0][x] - env.value(0, x)));
    for (int level = 1; level <= f.n_max; ++level) {
      const double rhs = f.f[level - 1][x] + f.q[level][z] - f.q[level][x];
      out.f_recursion = std::max(out.f_recursion, std::abs(f.f[level][x] - rhs));
      const double tl = f.tilde_B.value(level - 1, x - w) - f.tilde_B.value(level - 1, 0);
      const double def = (env.value(level, x) - env.value(level, w)) - (f.q[level][x] - f.q[level][w]);
      out.tilde_definition = std::max(out.tilde_definition, std::abs(tl - def));
    }
  }
  return out;
}

RatioResiduals check_lpp_stationary_identities(const Environment& env, const LppStationaryFields& f,
                                               const std::vector<int>& n_list, double s, double t,
                                               const TruncationPolicy& policy) {
  if (!(s < t)) throw std::invalid_argument("check_lpp_stationary_identities: need s < t");
  const TimeGrid& g = f.grid;
  const std::size_t is = g.index(s), it = g.index(t);
  if (is < f.window_start) throw GridError("check_lpp_stationary_identities: s before the window");
  const BoundaryWeight bw = BoundaryWeight::from(f.lambda, f.minus_f);
  RatioResiduals out;
  out.n_list = n_list;
  const double horizontal_target = (env.value(0, it) - env.value(0, is)) - f.lambda * (t - s);
  const double vertical_target = f.q[1][it];
  for (int n : n_list) {
    if (n < 1 || n + 1 > f.n_max) throw std::out_of_range("LPP identities: N must satisfy 1 <= N < n_max");
    TruncationPolicy p = policy;
    if (!p.cutoff) p.cutoff = lpp_cutoff({0, s}, n, f.lambda, policy.kappa);
    const auto lt = point_to_line_L(f.tilde_B, bw, {0, t}, n - 1, Restriction::none(), p);
    const auto ls = point_to_line_L(f.tilde_B, bw, {0, s}, n - 1, Restriction::none(), p);
    out.horizontal.push_back(lt.value - ls.value - horizontal_target);
    TruncationPolicy pv = policy;
    if (!pv.cutoff) pv.cutoff = lpp_cutoff({0, t}, n, f.lambda, policy.kappa);
    const auto l0 = point_to_line_L(f.tilde_B, bw, {0, t}, n, Restriction::none(), pv);
    const auto l1 = point_to_line_L(f.tilde_B, bw, {1, t}, n, Restriction::none(), pv);
    out.vertical.push_back(l0.value - l1.value - vertical_target);
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

std::vector<ComparisonGaps> check_lpp_comparison_levels(EnvView env, const BoundaryWeight& boundary,
                                                        const ComparisonCase& c, const TruncationPolicy& policy) {
  const TimeGrid& g = env.grid();
  const bool vertical = c.kind == ComparisonCase::Kind::Vertical;
  if (vertical && c.n < 1) throw std::invalid_argument("vertical comparison needs n >= 1");
  if (!vertical && !(c.s < c.t && c.t < c.T)) throw std::invalid_argument("horizontal comparison needs s < t < T");
  const Point a = vertical ? Point{0, 0.0} : Point{0, c.t};
  const Point b = vertical ? Point{1, 0.0} : Point{0, c.s};
  const double split = vertical ? c.t : c.T;
  const Point low = vertical ? a : b;
  const double cutoff = policy.cutoff ? *policy.cutoff : lpp_cutoff(low, c.n, boundary.lambda, policy.kappa);
  const std::size_t is = g.index(split);
  const std::size_t end = std::max(is, index_at_or_before(g, cutoff));
  const auto la = lpp_slices(env, a, c.n, end);
  const auto lb = lpp_slices(env, b, c.n, end);
  auto lbar = [&](const LppSlice& s, Restriction r) {
    return point_to_line_L_from_slice(s, g, boundary, r, cutoff, policy.threshold).value;
  };
  std::vector<ComparisonGaps> out;
  for (int n = vertical ? 1 : 0; n <= c.n; ++n) {
    const LppSlice& sa = la[n - a.level];
    const LppSlice& sb = lb[n - b.level];
    ComparisonGaps gaps;
    gaps.middle = sa.values[is] - sb.values[is];
    gaps.lower = lbar(sa, Restriction::below(split)) - lbar(sb, Restriction::below(split));
    gaps.upper = lbar(sa, Restriction::above(split)) - lbar(sb, Restriction::above(split));
    out.push_back(gaps);
  }
  return out;
}

ComparisonGaps check_lpp_comparison(EnvView env, const BoundaryWeight& boundary, const ComparisonCase& c,
                                    const TruncationPolicy& policy) {
  return check_lpp_comparison_levels(env, boundary, c, policy).back();
}

BusemannEstimate busemann_difference_sequence(EnvView env, Point x, Point y, double theta,
                                              const std::vector<int>& n_list, EndpointRule rule) {
  if (n_list.empty()) throw std::invalid_argument("busemann_difference_sequence: empty n list");
  const TimeGrid& g = env.grid();
  const int n_max = *std::max_element(n_list.begin(), n_list.end());
  double t_last = 0.0;
  for (int n : n_list) t_last = std::max(t_last, endpoint_time(n, theta, rule, g.step));
  const std::size_t end = g.index(t_last);
  return sequence_from_slices(lpp_slices(env, x, n_max, end), lpp_slices(env, y, n_max, end), g, theta, n_list,
                              rule);
}

ShapeReport shape_check(const std::vector<Environment>& envs, double t, int n) {
  ShapeReport rep;
  rep.t = t;
  rep.n = n;
  rep.target = 2.0 * std::sqrt(t);
  for (const auto& env : envs) rep.values.push_back(last_passage(env, {0, 0.0}, {n, n * t}) / n);
  rep.mean = mean(rep.values);
  rep.se = standard_error(rep.values);
  rep.spread = std::sqrt(variance(rep.values));
  return rep;
}

double last_passage_streaming(std::uint64_t seed, const TimeGrid& grid, Point from, Point to) {
  const std::size_t i0 = grid.index(from.time), it = grid.index(to.time);
  if (to.level < from.level || it < i0) throw std::invalid_argument("last_passage_streaming: points not ordered");
  std::vector<double> prev(grid.n_points, kLogZero), cur(grid.n_points, kLogZero);
  {
    const Environment env = Environment::generate(seed, grid, from.level, from.level);
    for (std::size_t x = i0; x <= it; ++x) cur[x] = env.value(from.level, x) - env.value(from.level, i0);
  }
  for (int k = from.level + 1; k <= to.level; ++k) {
    prev.swap(cur);
    std::fill(cur.begin(), cur.end(), kLogZero);
    const Environment env = Environment::generate(seed, grid, k, k);
    double best = kLogZero;
    for (std::size_t x = i0 + 1; x <= it; ++x) {
      best = std::max(best, prev[x - 1] - env.value(k, x - 1));
      cur[x] = best == kLogZero ? kLogZero : env.value(k, x) + best;
    }
  }
  return cur[it];
}

ShapeReport shape_check(const std::vector<std::uint64_t>& seeds, const TimeGrid& grid, double t, int n,
                        int workers) {
  ShapeReport rep;
  rep.t = t;
  rep.n = n;
  rep.target = 2.0 * std::sqrt(t);
  rep.values.assign(seeds.size(), 0.0);
  parallel_for(seeds.size(), workers, [&](std::size_t e) {
    rep.values[e] = last_passage_streaming(seeds[e], grid, {0, 0.0}, {n, n * t}) / n;
  });
  rep.mean = mean(rep.values);
  rep.se = standard_error(rep.values);
  rep.spread = std::sqrt(variance(rep.values));
  return rep;
}

std::vector<double> zero_temperature_check(const Environment& env, Point from, Point to,
                                           const std::vector<double>& betas) {
  const double L = last_passage(env, from, to);
  const double volume = (to.level - from.level) * std::log(env.grid().step);
  std::vector<double> gaps;
  for (double beta : betas) {
    const LogValue z = point_to_point_log_Z(scale(env, beta), from, to);
    gaps.push_back((z - volume) / beta - L);
  }
  return gaps;
}

LppBurkeReport lpp_burke_test(const BurkeConfig& cfg) {
  if (cfg.n_env < 500) throw std::invalid_argument("lpp_burke_test: need n_env >= 500");
  const double horizon = cfg.horizon > 0.0 ? cfg.horizon : default_horizon(cfg.lambda);
  const double back = std::ceil((horizon + 1.0) / cfg.step) * cfg.step;
  const double fwd = std::ceil(cfg.t_after / cfg.step) * cfg.step;
  const TimeGrid grid(-back, fwd, cfg.step);
  std::vector<double> q(cfg.n_env), tilde(cfg.n_env);
  parallel_for(cfg.n_env, cfg.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(cfg.seed, e), grid, 0, 1);
    const auto f = build_lpp_stationary_fields(env, cfg.lambda, 1, horizon);
    const std::size_t z = grid.index(0.0), w = f.window_start;
    const std::size_t one = static_cast<std::size_t>(std::llround(1.0 / cfg.step));
    q[e] = f.q[1][z];
    tilde[e] = f.tilde_B.value(0, z - w) - f.tilde_B.value(0, z - w - one);
  });
  LppBurkeReport rep;
  rep.lambda = cfg.lambda;
  rep.n_env = cfg.n_env;
  rep.exp_ks = ks_statistic(q, DistributionSpec::exponential(cfg.lambda));
  rep.q_mean = mean(q);
  rep.q_mean_se = standard_error(q);
  rep.tilde_ks = ks_statistic(tilde, DistributionSpec::normal(0.0, 1.0));
  rep.samples = std::move(q);
  return rep;
}

}  // namespace oy
