#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "oy/partition.hpp"
#include "oy/rng.hpp"

namespace oy {

struct PolymerPath {
  Point base;
  Point terminal;
  std::vector<double> jumps;  // tau_m < ... < tau_{n-1}
  std::uint64_t stream = 0;
};

/// Quenched path law Q_{(m,s),(n,t)} on the lattice. Forward slices from the
/// base and backward slices to the terminal point are computed once.
class PathSampler {
 public:
  PathSampler(EnvView env, Point from, Point to);

  LogValue log_Z() const { return log_z_; }
  const TimeGrid& grid() const { return grid_; }
  int jumps() const { return to_.level - from_.level; }

  /// P(tau_k = x) over grid indices x, normalized.
  std::vector<double> marginal_density(int k) const;
  /// Law of tau_k given tau_{k_prev} = s_prev (k > k_prev >= m). k_prev = m - 1
  /// conditions on the start only and s_prev must then be the base time.
  std::vector<double> transition_density(int k_prev, double s_prev, int k) const;
  /// Joint law P(tau_m = x_m, ..., tau_{n-1} = x_{n-1}), from the product form.
  double joint_probability(const std::vector<std::size_t>& jump_indices) const;

  PolymerPath sample(Rng& rng) const;

  /// Rate Z_{(k+1,u),(n,t)} / Z_{(k,u),(n,t)} of a jump from level k at time u.
  double jump_rate(int k, double u) const;

  /// log Z_{(k,u),(n,t)} on the lattice (backward slice).
  LogValue backward(int k, std::size_t u) const { return back_[k - from_.level][u]; }

 private:
  EnvView env_;
  TimeGrid grid_;
  Point from_, to_;
  std::size_t i0_, it_;
  double log_step_;
  LogValue log_z_;
  std::vector<PartitionSlice> fwd_;
  std::vector<std::vector<LogValue>> back_;   // log Z_{(k,u),(n,t)}
  std::vector<std::vector<LogValue>> post_;   // post_[k](v): jump into level k at v, then on to (n,t)

  std::size_t draw(const std::vector<LogValue>& logw, std::size_t lo, std::size_t hi, Rng& rng) const;
};

/// P(exists k: tau_{k+1} - tau_k < delta, tau_k < T) for each delta.
std::vector<double> min_gap_probabilities(const std::vector<PolymerPath>& paths, double horizon,
                                          const std::vector<double>& deltas);

/// CSV rows: path_id,stream,k,tau
void write_paths_csv(std::ostream& os, const std::vector<PolymerPath>& paths);

}  // namespace oy
