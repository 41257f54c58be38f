#include "oy/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oy {

PathSampler::PathSampler(EnvView env, Point from, Point to) : env_(env), grid_(env.grid()), from_(from), to_(to) {
  if (to.level <= from.level) throw std::invalid_argument("PathSampler: need at least one jump");
  i0_ = grid_.index(from.time);
  it_ = grid_.index(to.time);
  if (it_ <= i0_) throw std::invalid_argument("PathSampler: terminal time must exceed base time");
  log_step_ = std::log(grid_.step);

  fwd_ = forward_slices(env, from, to.level, it_);
  log_z_ = fwd_.back().values[it_];

  const int m = from.level, n = to.level;
  const auto levels = static_cast<std::size_t>(n - m + 1);
  back_.assign(levels, std::vector<LogValue>(grid_.n_points, kLogZero));
  post_.assign(levels, std::vector<LogValue>(grid_.n_points, kLogZero));

  auto& top = back_[n - m];
  for (std::size_t u = 0; u <= it_; ++u) top[u] = env.value(n, it_) - env.value(n, u);

  for (int k = n; k > m; --k) {
    auto& post = post_[k - m];
    const auto& bk = back_[k - m];
    for (std::size_t v = 0; v < it_; ++v)
      post[v] = bk[v + 1] == kLogZero ? kLogZero : env.value(k, v + 1) - env.value(k, v) + bk[v + 1];
    // back_{k-1}(u) = -B(u) + lse_{v in [u, t)} (B(v) + log step + post_k(v))
    auto& out = back_[k - 1 - m];
    LogValue acc = kLogZero;
    for (std::size_t u = it_; u-- > 0;) {
      if (post[u] != kLogZero) acc = log_add(acc, env.value(k - 1, u) + log_step_ + post[u]);
      out[u] = acc == kLogZero ? kLogZero : acc - env.value(k - 1, u);
    }
  }
}

std::vector<double> PathSampler::transition_density(int k_prev, double s_prev, int k) const {
  const int m = from_.level, n = to_.level;
  if (k <= k_prev || k >= n || k_prev < m - 1) throw std::invalid_argument("transition_density: bad levels");
  const std::size_t sp = grid_.index(s_prev);

  std::vector<LogValue> pre(grid_.n_points, kLogZero);
  std::size_t lo;
  if (k_prev == m - 1) {
    if (sp != i0_) throw std::invalid_argument("transition_density: start condition must use the base time");
    lo = i0_;
    pre = fwd_[k - m].values;
  } else {
    if (sp + 1 >= it_) throw std::invalid_argument("transition_density: empty support, previous jump at grid end");
    lo = sp + 1;
    const int first = k_prev + 1;
    const double lead = env_.value(first, sp + 1) - env_.value(first, sp);
    if (k == first) {
      for (std::size_t u = lo; u <= it_; ++u) pre[u] = env_.value(k, u) - env_.value(k, sp);
    } else {
      auto rows = forward_slices(env_, {first, grid_.time(sp + 1)}, k, it_);
      for (std::size_t u = lo; u <= it_; ++u)
        pre[u] = rows.back().values[u] == kLogZero ? kLogZero : lead + rows.back().values[u];
    }
  }

  const auto& post = post_[k + 1 - m];
  std::vector<LogValue> logw(grid_.n_points, kLogZero);
  for (std::size_t u = lo; u < it_; ++u)
    if (pre[u] != kLogZero && post[u] != kLogZero) logw[u] = pre[u] + log_step_ + post[u];
  const LogValue total = log_sum_exp(logw);
  if (total == kLogZero) throw std::domain_error("transition_density: empty support");
  std::vector<double> p(grid_.n_points, 0.0);
  for (std::size_t u = lo; u < it_; ++u) p[u] = logw[u] == kLogZero ? 0.0 : std::exp(logw[u] - total);
  return p;
}

std::vector<double> PathSampler::marginal_density(int k) const {
  return transition_density(from_.level - 1, from_.time, k);
}

double PathSampler::joint_probability(const std::vector<std::size_t>& x) const {
  const int m = from_.level, n = to_.level;
  if (static_cast<int>(x.size()) != n - m) throw std::invalid_argument("joint_probability: wrong number of jumps");
  if (x.front() < i0_ || x.back() >= it_) return 0.0;
  for (std::size_t j = 1; j < x.size(); ++j)
    if (x[j] <= x[j - 1]) return 0.0;
  double logw = env_.value(m, x[0]) - env_.value(m, i0_);
  for (int k = m + 1; k < n; ++k)
    logw += env_.value(k, x[k - m]) - env_.value(k, x[k - m - 1]);
  logw += env_.value(n, it_) - env_.value(n, x.back());
  logw += (n - m) * log_step_;
  return std::exp(logw - log_z_);
}

std::size_t PathSampler::draw(const std::vector<LogValue>& logw, std::size_t lo, std::size_t hi, Rng& rng) const {
  LogValue top = kLogZero;
  for (std::size_t u = lo; u < hi; ++u) top = std::max(top, logw[u]);
  if (top == kLogZero) throw std::domain_error("sample: empty support");
  double total = 0.0;
  for (std::size_t u = lo; u < hi; ++u) total += std::exp(logw[u] - top);
  const double target = rng.uniform() * total;
  double cum = 0.0;
  std::size_t last = lo;
  for (std::size_t u = lo; u < hi; ++u) {
    if (logw[u] == kLogZero) continue;
    cum += std::exp(logw[u] - top);
    last = u;
    if (cum > target) return u;
  }
  return last;
}

PolymerPath PathSampler::sample(Rng& rng) const {
  const int m = from_.level, n = to_.level;
  PolymerPath path{from_, to_, {}, 0};
  path.jumps.reserve(static_cast<std::size_t>(n - m));
  std::vector<LogValue> logw(grid_.n_points, kLogZero);

  // tau_m: B_m(s,u) + post_{m+1}(u), u in [s, t)
  for (std::size_t u = i0_; u < it_; ++u) logw[u] = env_.value(m, u) + post_[1][u];
  std::size_t prev = draw(logw, i0_, it_, rng);
  path.jumps.push_back(grid_.time(prev));

  for (int k = m + 1; k < n; ++k) {
    const auto& post = post_[k + 1 - m];
    for (std::size_t u = prev + 1; u < it_; ++u) logw[u] = env_.value(k, u) + post[u];
    prev = draw(logw, prev + 1, it_, rng);
    path.jumps.push_back(grid_.time(prev));
  }
  return path;
}

double PathSampler::jump_rate(int k, double u) const {
  if (k < from_.level || k >= to_.level) throw std::invalid_argument("jump_rate: level outside path range");
  const std::size_t x = grid_.index(u);
  if (x >= it_) throw std::invalid_argument("jump_rate: time at or past terminal");
  const LogValue num = post_[k + 1 - from_.level][x], den = back_[k - from_.level][x];
  if (den == kLogZero) throw std::domain_error("jump_rate: unreachable state");
  return std::exp(num - den);
}

std::vector<double> min_gap_probabilities(const std::vector<PolymerPath>& paths, double horizon,
                                          const std::vector<double>& deltas) {
  std::vector<double> out(deltas.size(), 0.0);
  if (paths.empty()) return out;
  for (const auto& p : paths) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < p.jumps.size(); ++k)
      if (p.jumps[k] < horizon) gap = std::min(gap, p.jumps[k + 1] - p.jumps[k]);
    for (std::size_t d = 0; d < deltas.size(); ++d)
      if (gap < deltas[d] - 1e-12) out[d] += 1.0;
  }
  for (double& v : out) v /= static_cast<double>(paths.size());
  return out;
}

void write_paths_csv(std::ostream& os, const std::vector<PolymerPath>& paths) {
  os << "path_id,stream,k,tau\n";
  os.precision(17);
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = 0; j < paths[i].jumps.size(); ++j)
      os << i << ',' << paths[i].stream << ',' << paths[i].base.level + static_cast<int>(j) << ','
         << paths[i].jumps[j] << '\n';
}

}  // namespace oy
