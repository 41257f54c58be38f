#include "oy/busemann.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oy/parallel.hpp"
#include "oy/rng.hpp"

namespace oy {

double snap_theta(double theta, double step) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  const double k = std::max(1.0, std::round(theta / step));
  return k * step;
}

double endpoint_time(int n, double theta, EndpointRule rule, double step) {
  const double th = snap_theta(theta, step);
  switch (rule) {
    case EndpointRule::Linear:
      return n * th;
    case EndpointRule::LinearPlusSqrt:
      return std::round((n * th + std::sqrt(static_cast<double>(n))) / step) * step;
  }
  return n * th;
}

std::vector<double> BusemannEstimate::successive_differences() const {
  std::vector<double> d(value.size(), 0.0);
  for (std::size_t i = 1; i < value.size(); ++i) d[i] = std::abs(value[i] - value[i - 1]);
  return d;
}

double BusemannEstimate::error_bar() const {
  const auto d = successive_differences();
  if (d.size() < 2) return 0.0;
  if (d.size() == 2) return d[1];
  return std::max(d[d.size() - 1], d[d.size() - 2]);
}

bool BusemannEstimate::differences_decrease(double slack) const {
  const auto d = successive_differences();
  if (d.size() < 3) return true;
  return d.back() <= d[1] + slack;
}

BusemannEstimate sequence_from_slices(const std::vector<PartitionSlice>& fx, const std::vector<PartitionSlice>& fy,
                                      const TimeGrid& g, double theta, const std::vector<int>& n_list,
                                      EndpointRule rule) {
  if (fx.empty() || fy.empty()) throw std::invalid_argument("sequence_from_slices: empty slices");
  const Point x = fx.front().base, y = fy.front().base;
  BusemannEstimate est{x, y, snap_theta(theta, g.step), rule, {}, {}, {}};
  for (int n : n_list) {
    if (n < x.level || n < y.level) throw std::invalid_argument("busemann sequence: n below a base level");
    if (static_cast<std::size_t>(n - x.level) >= fx.size() || static_cast<std::size_t>(n - y.level) >= fy.size())
      throw std::out_of_range("busemann sequence: slices stop below level " + std::to_string(n));
    const double tn = endpoint_time(n, theta, rule, g.step);
    const std::size_t k = g.index(tn);
    const double a = fx[n - x.level].values[k], b = fy[n - y.level].values[k];
    if (a == kLogZero || b == kLogZero) throw std::domain_error("busemann sequence: endpoint not reachable on the grid");
    est.n.push_back(n);
    est.t_n.push_back(tn);
    est.value.push_back(a - b);
  }
  return est;
}

BusemannEstimate ratio_sequence(EnvView env, Point x, Point y, double theta, const std::vector<int>& n_list,
                                EndpointRule rule) {
  if (n_list.empty()) throw std::invalid_argument("ratio_sequence: empty n list");
  const TimeGrid& g = env.grid();
  const int n_max = *std::max_element(n_list.begin(), n_list.end());
  double t_last = 0.0;
  for (int n : n_list) t_last = std::max(t_last, endpoint_time(n, theta, rule, g.step));
  const std::size_t end = g.index(t_last);
  return sequence_from_slices(forward_slices(env, x, n_max, end), forward_slices(env, y, n_max, end), g, theta,
                              n_list, rule);
}

std::vector<double> check_cocycle(const BusemannEstimate& xy, const BusemannEstimate& yz,
                                  const BusemannEstimate& xz) {
  // B(x,y) = B(x,z) + B(z,y), with B(z,y) = -B(y,z)
  if (xy.n != yz.n || xy.n != xz.n || xy.t_n != yz.t_n || xy.t_n != xz.t_n)
    throw std::invalid_argument("check_cocycle: estimates use different endpoint sequences");
  std::vector<double> res(xy.n.size());
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = std::abs(xy.value[i] - (xz.value[i] - yz.value[i]));
  return res;
}

std::vector<ComparisonGaps> check_comparison_levels(EnvView env, const BoundaryWeight& boundary,
                                                    const ComparisonCase& c, const TruncationPolicy& policy) {
  const TimeGrid& g = env.grid();
  const bool vertical = c.kind == ComparisonCase::Kind::Vertical;
  if (vertical && c.n < 1) throw std::invalid_argument("vertical comparison needs n >= 1");
  if (!vertical && !(c.s < c.t && c.t < c.T)) throw std::invalid_argument("horizontal comparison needs s < t < T");
  // vertical: (0,0) over (1,0) to (n,t); horizontal: (0,t) over (0,s) to (n,T)
  const Point a = vertical ? Point{0, 0.0} : Point{0, c.t};
  const Point b = vertical ? Point{1, 0.0} : Point{0, c.s};
  const double split = vertical ? c.t : c.T;
  const Point low = vertical ? a : b;
  const double cutoff = policy.cutoff ? *policy.cutoff : polymer_cutoff(low, c.n, boundary.lambda, policy.kappa);
  const double cut_time = std::min(cutoff, g.end());
  const auto cut_index = static_cast<std::size_t>(std::floor((cut_time - g.t_min) / g.step + 1e-9));
  const std::size_t is = g.index(split);
  const std::size_t end = std::max(is, cut_index);
  const auto fa = forward_slices(env, a, c.n, end);
  const auto fb = forward_slices(env, b, c.n, end);
  auto zbar = [&](const PartitionSlice& s, Restriction r) {
    return point_to_line_from_slice(s, g, boundary, r, cutoff, policy.threshold).log_value;
  };
  std::vector<ComparisonGaps> out;
  for (int n = vertical ? 1 : 0; n <= c.n; ++n) {
    const PartitionSlice& sa = fa[n - a.level];
    const PartitionSlice& sb = fb[n - b.level];
    ComparisonGaps gaps;
    gaps.middle = sa.values[is] - sb.values[is];
    gaps.lower = zbar(sa, Restriction::below(split)) - zbar(sb, Restriction::below(split));
    gaps.upper = zbar(sa, Restriction::above(split)) - zbar(sb, Restriction::above(split));
    out.push_back(gaps);
  }
  return out;
}

ComparisonGaps check_comparison(EnvView env, const BoundaryWeight& boundary, const ComparisonCase& c,
                                const TruncationPolicy& policy) {
  return check_comparison_levels(env, boundary, c, policy).back();
}

double fit_gamma_shape_ks(const std::vector<double>& samples, double lo, double hi) {
  auto ks = [&](double shape) { return ks_statistic(samples, DistributionSpec::gamma(shape)).statistic; };
  const int n_scan = 200;
  double best = lo, best_d = ks(lo);
  const double ratio = std::log(hi / lo) / n_scan;
  for (int i = 1; i <= n_scan; ++i) {
    const double a = lo * std::exp(ratio * i);
    const double d = ks(a);
    if (d < best_d) {
      best_d = d;
      best = a;
    }
  }
  // refine around the scan minimum
  double a = best * std::exp(-ratio), b = best * std::exp(ratio);
  for (int it = 0; it < 60; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (ks(m1) <= ks(m2)) b = m2; else a = m1;
  }
  const double refined = 0.5 * (a + b);
  return ks(refined) <= best_d ? refined : best;
}

LimitReport limiting_distribution_test(const LimitConfig& cfg) {
  LimitReport rep;
  rep.theta = snap_theta(cfg.theta, cfg.step);
  rep.lambda_theta = inverse_trigamma(rep.theta);
  rep.t = cfg.t;
  rep.n_star = cfg.n_star;
  const double t_end = cfg.n_star * rep.theta;
  const TimeGrid grid(0.0, t_end, cfg.step);
  std::vector<double> vert(cfg.n_env), horiz(cfg.n_env);
  parallel_for(cfg.n_env, cfg.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(cfg.seed, e), grid, 0, cfg.n_star);
    const std::size_t end = grid.n_points - 1;
    const auto f00 = forward_slices(env, {0, 0.0}, cfg.n_star, end);
    const auto f10 = forward_slices(env, {1, 0.0}, cfg.n_star, end);
    const auto f0t = forward_slices(env, {0, cfg.t}, cfg.n_star, end);
    const LogValue z00 = f00.back().values[end];
    vert[e] = std::exp(-(z00 - f10.back().values[end]));
    horiz[e] = f0t.back().values[end] - z00;
  });
  rep.vertical_ks = ks_statistic(vert, DistributionSpec::gamma(rep.lambda_theta));
  rep.vertical_shape_fit = fit_gamma_shape_ks(vert);
  rep.horizontal_mean = mean(horiz);
  rep.horizontal_se = standard_error(horiz);
  rep.horizontal_target = -rep.lambda_theta * cfg.t;
  rep.horizontal_ks = ks_statistic(horiz, DistributionSpec::normal(rep.horizontal_target, cfg.t));
  rep.vertical_samples = std::move(vert);
  rep.horizontal_samples = std::move(horiz);
  return rep;
}

std::vector<double> dominant_slope_check(EnvView env, const BoundaryWeight& boundary, double theta,
                                         const std::vector<int>& n_list, const TruncationPolicy& policy) {
  const TimeGrid& g = env.grid();
  const double slope = trigamma(boundary.lambda);
  if (std::abs(theta - slope) < 1e-12) throw std::invalid_argument("dominant_slope_check: theta equals the slope");
  std::vector<double> out;
  for (int n : n_list) {
    const double split = std::round(n * theta / g.step) * g.step;
    const Point base{0, 0.0};
    const double cutoff = policy.cutoff ? *policy.cutoff : polymer_cutoff(base, n, boundary.lambda, policy.kappa);
    const double cut_time = std::min(cutoff, g.end());
    const auto end = static_cast<std::size_t>(std::floor((cut_time - g.t_min) / g.step + 1e-9));
    const auto rows = forward_slices(env, base, n, end);
    const auto full = point_to_line_from_slice(rows.back(), g, boundary, Restriction::none(), cutoff, policy.threshold);
    const Restriction r = theta < slope ? Restriction::above(split) : Restriction::below(split);
    const auto part = point_to_line_from_slice(rows.back(), g, boundary, r, cutoff, policy.threshold);
    out.push_back(std::exp(part.log_value - full.log_value));
  }
  return out;
}

}  // namespace oy
