#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oy {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class MemoryBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimeGrid {
  double t_min = 0.0;
  double t_max = 1.0;
  double step = 1.0;
  std::size_t n_points = 2;

  TimeGrid() = default;
  TimeGrid(double t_min, double t_max, double step);

  double time(std::size_t k) const { return t_min + static_cast<double>(k) * step; }
  double end() const { return time(n_points - 1); }

  /// Grid index of t; throws GridError unless t is within 1e-9*step of a grid point.
  std::size_t index(double t) const;
  bool contains(double t) const;
  /// Absolute index round(t/step) of grid point k; anchors the random stream.
  std::int64_t absolute(std::size_t k) const { return offset_ + static_cast<std::int64_t>(k); }

  /// Sub-grid [a, b] with the same step.
  TimeGrid window(double a, double b) const;
  bool same_as(const TimeGrid& other) const;

 private:
  std::int64_t offset_ = 0;
  void init();
};

/// Largest number of stored doubles an environment may hold.
std::size_t& environment_memory_budget();

/// Field of Brownian paths B_i on a grid, i in [level_lo, level_hi].
/// Stored as path values B_i(t_k); increments are differences.
class Environment {
 public:
  Environment() = default;

  /// Counter-based generation: the increment over [t_k, t_k + step] on level i
  /// depends only on (seed, i, step, absolute index of t_k). Paths are pinned
  /// to B_i(0) = 0 when 0 is a grid point, otherwise to B_i(t_min) = 0.
  static Environment generate(std::uint64_t seed, const TimeGrid& grid, int level_lo, int level_hi);
  static Environment zero(const TimeGrid& grid, int level_lo, int level_hi);
  /// Takes path values verbatim (no pinning).
  static Environment from_paths(const TimeGrid& grid, int level_lo, std::vector<std::vector<double>> paths,
                                std::uint64_t seed = 0);

  const TimeGrid& grid() const { return grid_; }
  int level_lo() const { return level_lo_; }
  int level_hi() const { return level_hi_; }
  std::uint64_t seed() const { return seed_; }
  bool has_level(int i) const { return i >= level_lo_ && i <= level_hi_; }

  /// B_i(t_k)
  double value(int level, std::size_t k) const { return paths_[level - level_lo_][k]; }
  const std::vector<double>& path(int level) const;

  double increment(int level, double s, double t) const;
  double increment_index(int level, std::size_t a, std::size_t b) const { return value(level, b) - value(level, a); }

  /// The same paths sampled every `factor` points (sums of consecutive increments).
  Environment coarsen(int factor) const;
  /// Restriction to a sub-window of the grid.
  Environment window(double a, double b) const;

  void save(const std::string& file) const;
  static Environment load(const std::string& file);

 private:
  std::uint64_t seed_ = 0;
  TimeGrid grid_;
  int level_lo_ = 0;
  int level_hi_ = -1;
  std::vector<std::vector<double>> paths_;

  void check_level(int level) const;
};

/// Read-only view scaling every increment by beta.
class EnvView {
 public:
  EnvView(const Environment& env, double beta = 1.0) : env_(&env), beta_(beta) {}  // NOLINT implicit

  const TimeGrid& grid() const { return env_->grid(); }
  const Environment& base() const { return *env_; }
  double beta() const { return beta_; }
  bool has_level(int i) const { return env_->has_level(i); }
  double value(int level, std::size_t k) const { return beta_ * env_->value(level, k); }
  double increment(int level, double s, double t) const { return beta_ * env_->increment(level, s, t); }

 private:
  const Environment* env_;
  double beta_;
};

inline EnvView scale(const Environment& env, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("scale: beta must be positive");
  return EnvView(env, beta);
}

}  // namespace oy
