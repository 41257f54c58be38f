#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "oy/environment.hpp"
#include "oy/numerics.hpp"

namespace oy {

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Space-time point (level, time).
struct Point {
  int level = 0;
  double time = 0.0;
};

inline constexpr std::size_t kToGridEnd = std::numeric_limits<std::size_t>::max();

/// log Z_{base,(level,x)} over the grid; entries before the base time are -inf.
/// Lattice convention: jump times s <= tau_m < ... < tau_{n-1} <= x - step, each
/// weighted by the step (left-endpoint quadrature of the iterated integral).
struct PartitionSlice {
  int level = 0;
  Point base;
  std::size_t base_index = 0;
  std::vector<LogValue> values;
};

/// One row per level m..n_max, O(levels x grid) by running log-sum-exp.
/// Only endpoints up to end_index are filled.
std::vector<PartitionSlice> forward_slices(EnvView env, Point base, int n_max, std::size_t end_index = kToGridEnd);

/// Same quantity by the direct O(levels x grid^2) recursion. Reference only.
std::vector<PartitionSlice> forward_slices_naive(EnvView env, Point base, int n_max,
                                                 std::size_t end_index = kToGridEnd);

/// log Z_{from,to}. m = n gives B_m(s,t); t = s with n > m gives -inf.
LogValue point_to_point_log_Z(EnvView env, Point from, Point to);

struct Restriction {
  enum class Kind { None, Below, Above, Interval };
  Kind kind = Kind::None;
  double lo = 0.0;  // Above: T, Interval: S
  double hi = 0.0;  // Below: T, Interval: T

  static Restriction none() { return {}; }
  /// endpoints x < T
  static Restriction below(double t) { return {Kind::Below, 0.0, t}; }
  /// endpoints x >= T
  static Restriction above(double t) { return {Kind::Above, t, 0.0}; }
  /// endpoints S <= x <= T
  static Restriction interval(double s, double t) { return {Kind::Interval, s, t}; }
};

/// Terminal weight e^{-Bbar_{n+1}(x) - lambda x}. Without a boundary field Bbar = 0.
struct BoundaryWeight {
  double lambda = 1.0;
  std::optional<EnvView> field;

  static BoundaryWeight zero(double lambda) { return {lambda, std::nullopt}; }
  static BoundaryWeight from(double lambda, EnvView f) { return {lambda, f}; }
  double bar(int level, std::size_t k) const { return field ? field->value(level, k) : 0.0; }
};

struct TruncationPolicy {
  double kappa = 6.0;
  double threshold = 1e-3;  // allowed mass fraction in the last decade before the cutoff
  std::optional<double> cutoff;  // explicit common cutoff time
};

struct ZbarResult {
  LogValue log_value = kLogZero;
  double cutoff = 0.0;
  LogValue tail_log_fraction = kLogZero;  // log of (last-decade mass / total)
};

/// s + kappa (n-m+1) trigamma(lambda)
double polymer_cutoff(Point base, int n, double lambda, double kappa);

/// Quadrature of e^{-Bbar(x) - lambda x} Z_{base,(n,x)} over the restricted endpoints.
ZbarResult point_to_line_log_Zbar(EnvView env, const BoundaryWeight& boundary, Point base, int n,
                                  Restriction restriction, const TruncationPolicy& policy = {});

/// Same, from a precomputed level-n slice and an explicit cutoff time.
ZbarResult point_to_line_from_slice(const PartitionSlice& slice, const TimeGrid& grid,
                                    const BoundaryWeight& boundary, Restriction restriction, double cutoff,
                                    double threshold);

/// Log-Euler-Maruyama for dZ_n = Z_{n-1} dt + Z_n o dB_n from (m,0), read in
/// Stratonovich form (the exponential lattice weights). Uses the grid step.
std::vector<PartitionSlice> evolve_sde(EnvView env, int m, int n_max, double t_max);

/// CSV rows: level,time,logZ
void write_slices_csv(std::ostream& os, const std::vector<PartitionSlice>& slices, const TimeGrid& grid);

}  // namespace oy
