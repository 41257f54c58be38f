#include "oy/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oy {

namespace {

void check_levels(EnvView env, int lo, int hi) {
  for (int k = lo; k <= hi; ++k)
    if (!env.has_level(k)) throw std::out_of_range("environment lacks level " + std::to_string(k));
}

std::size_t clamp_end(const TimeGrid& g, std::size_t end_index) {
  return std::min(end_index, g.n_points - 1);
}

}  // namespace

std::vector<PartitionSlice> forward_slices(EnvView env, Point base, int n_max, std::size_t end_index) {
  if (n_max < base.level) throw std::invalid_argument("forward_slices: n_max below base level");
  check_levels(env, base.level, n_max);
  const TimeGrid& g = env.grid();
  const std::size_t i0 = g.index(base.time);
  const std::size_t end = clamp_end(g, end_index);
  const double log_step = std::log(g.step);

  std::vector<PartitionSlice> rows;
  rows.reserve(static_cast<std::size_t>(n_max - base.level + 1));

  PartitionSlice first{base.level, base, i0, std::vector<LogValue>(g.n_points, kLogZero)};
  const double b0 = env.value(base.level, i0);
  for (std::size_t x = i0; x <= end; ++x) first.values[x] = env.value(base.level, x) - b0;
  rows.push_back(std::move(first));

  for (int k = base.level + 1; k <= n_max; ++k) {
    const auto& prev = rows.back().values;
    PartitionSlice row{k, base, i0, std::vector<LogValue>(g.n_points, kLogZero)};
    // acc(x) = log sum_{u in [i0, x)} step * Z_{k-1}(u) e^{-B_k(u)}
    LogValue acc = kLogZero;
    for (std::size_t x = i0 + 1; x <= end; ++x) {
      acc = log_add(acc, prev[x - 1] - env.value(k, x - 1) + log_step);
      row.values[x] = acc == kLogZero ? kLogZero : env.value(k, x) + acc;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PartitionSlice> forward_slices_naive(EnvView env, Point base, int n_max, std::size_t end_index) {
  if (n_max < base.level) throw std::invalid_argument("forward_slices_naive: n_max below base level");
  check_levels(env, base.level, n_max);
  const TimeGrid& g = env.grid();
  const std::size_t i0 = g.index(base.time);
  const std::size_t end = clamp_end(g, end_index);
  const double log_step = std::log(g.step);

  std::vector<PartitionSlice> rows;
  PartitionSlice first{base.level, base, i0, std::vector<LogValue>(g.n_points, kLogZero)};
  for (std::size_t x = i0; x <= end; ++x)
    first.values[x] = env.value(base.level, x) - env.value(base.level, i0);
  rows.push_back(std::move(first));

  std::vector<LogValue> terms;
  for (int k = base.level + 1; k <= n_max; ++k) {
    const auto& prev = rows.back().values;
    PartitionSlice row{k, base, i0, std::vector<LogValue>(g.n_points, kLogZero)};
    for (std::size_t x = i0 + 1; x <= end; ++x) {
      terms.clear();
      for (std::size_t u = i0; u < x; ++u)
        terms.push_back(prev[u] + (env.value(k, x) - env.value(k, u)) + log_step);
      row.values[x] = log_sum_exp(terms);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

LogValue point_to_point_log_Z(EnvView env, Point from, Point to) {
  const TimeGrid& g = env.grid();
  const std::size_t a = g.index(from.time), b = g.index(to.time);
  if (to.level < from.level || b < a) {
    std::ostringstream msg;
    msg << "point_to_point_log_Z: (" << from.level << "," << from.time << ") is not <= (" << to.level << ","
        << to.time << ")";
    throw std::invalid_argument(msg.str());
  }
  if (from.level == to.level) {
    check_levels(env, from.level, from.level);
    return env.value(from.level, b) - env.value(from.level, a);
  }
  return forward_slices(env, from, to.level, b).back().values[b];
}

double polymer_cutoff(Point base, int n, double lambda, double kappa) {
  return base.time + kappa * (n - base.level + 1) * trigamma(lambda);
}

ZbarResult point_to_line_from_slice(const PartitionSlice& slice, const TimeGrid& g, const BoundaryWeight& boundary,
                                    Restriction r, double cutoff, double threshold) {
  if (!(boundary.lambda > 0.0)) throw std::invalid_argument("point-to-line: lambda must be positive");
  const std::size_t i0 = slice.base_index;
  const double cut_time = std::min(cutoff, g.end());
  const auto cut = static_cast<std::size_t>(std::floor((cut_time - g.t_min) / g.step + 1e-9));

  std::size_t lo = i0, hi = cut;
  bool truncated = true;  // upper end of the range is the cutoff
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
  const double log_step = std::log(g.step);
  // decade before the cutoff: [s + 0.9 (cut - s), cut]
  const auto decade = static_cast<std::size_t>(i0 + std::floor(0.9 * static_cast<double>(cut - i0)));
  LogValue total = kLogZero, tail = kLogZero;
  for (std::size_t x = lo; x <= hi; ++x) {
    const LogValue v = slice.values[x];
    if (v == kLogZero) continue;
    const LogValue term = v - boundary.bar(bar_level, x) - boundary.lambda * g.time(x) + log_step;
    total = log_add(total, term);
    if (truncated && x >= decade) tail = log_add(tail, term);
  }
  ZbarResult out{total, cut_time, total == kLogZero ? kLogZero : tail - total};
  if (truncated && out.tail_log_fraction > std::log(threshold)) {
    std::ostringstream msg;
    msg << "point-to-line truncation at x=" << cut_time << " leaves mass fraction " << std::exp(out.tail_log_fraction)
        << " in the last decade (threshold " << threshold << ")";
    throw TruncationError(msg.str());
  }
  return out;
}

ZbarResult point_to_line_log_Zbar(EnvView env, const BoundaryWeight& boundary, Point base, int n,
                                  Restriction restriction, const TruncationPolicy& policy) {
  if (n < base.level) throw std::invalid_argument("point-to-line: n below base level");
  if (boundary.field && !boundary.field->grid().same_as(env.grid()))
    throw GridError("boundary field grid differs from environment grid");
  const TimeGrid& g = env.grid();
  const double cutoff = policy.cutoff ? *policy.cutoff : polymer_cutoff(base, n, boundary.lambda, policy.kappa);
  const double cut_time = std::min(cutoff, g.end());
  const auto cut = static_cast<std::size_t>(std::floor((cut_time - g.t_min) / g.step + 1e-9));
  auto rows = forward_slices(env, base, n, cut);
  return point_to_line_from_slice(rows.back(), g, boundary, restriction, cutoff, policy.threshold);
}

std::vector<PartitionSlice> evolve_sde(EnvView env, int m, int n_max, double t_max) {
  if (n_max < m) throw std::invalid_argument("evolve_sde: n_max below m");
  check_levels(env, m, n_max);
  const TimeGrid& g = env.grid();
  const std::size_t i0 = g.index(0.0), end = g.index(t_max);
  const double dt = g.step, log_dt = std::log(dt);
  const auto levels = static_cast<std::size_t>(n_max - m + 1);

  std::vector<PartitionSlice> rows;
  for (int k = m; k <= n_max; ++k) rows.push_back({k, {m, 0.0}, i0, std::vector<LogValue>(g.n_points, kLogZero)});
  rows[0].values[i0] = 0.0;
  for (std::size_t x = i0; x < end; ++x) {
    // update top-down so level k reads level k-1 at the old time
    for (std::size_t j = levels; j-- > 0;) {
      const int k = m + static_cast<int>(j);
      const double db = env.value(k, x + 1) - env.value(k, x);
      const LogValue cur = rows[j].values[x];
      if (j == 0) {
        rows[j].values[x + 1] = cur + db;
        continue;
      }
      const LogValue below = rows[j - 1].values[x];
      if (cur == kLogZero)
        rows[j].values[x + 1] = below == kLogZero ? kLogZero : below + log_dt + db;
      else
        rows[j].values[x + 1] = cur + (below == kLogZero ? 0.0 : std::exp(below - cur) * dt) + db;
    }
  }
  return rows;
}

void write_slices_csv(std::ostream& os, const std::vector<PartitionSlice>& slices, const TimeGrid& grid) {
  os << "level,time,logZ\n";
  os.precision(17);
  for (const auto& s : slices)
    for (std::size_t x = s.base_index; x < s.values.size(); ++x)
      if (s.values[x] != kLogZero) os << s.level << ',' << grid.time(x) << ',' << s.values[x] << '\n';
}

}  // namespace oy
