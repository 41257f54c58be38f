#pragma once

#include <cstdint>
#include <vector>

#include "oy/busemann.hpp"
#include "oy/environment.hpp"
#include "oy/partition.hpp"
#include "oy/stationary.hpp"

namespace oy {

/// L_{base,(level,x)} over the grid (-inf before the base or where no lattice
/// path fits). Jump times strictly increase, as in the polymer lattice.
using LppSlice = PartitionSlice;

/// L_k(x) = B_k(x) + max_{u in [s, x)} (L_{k-1}(u) - B_k(u)), O(levels x grid).
std::vector<LppSlice> lpp_slices(EnvView env, Point base, int n_max, std::size_t end_index = kToGridEnd);
/// Direct O(levels x grid^2) maximization. Reference only.
std::vector<LppSlice> lpp_slices_naive(EnvView env, Point base, int n_max, std::size_t end_index = kToGridEnd);

double last_passage(EnvView env, Point from, Point to);

/// last_passage on the generated environment (seed, grid), producing one level
/// at a time so memory stays O(grid).
double last_passage_streaming(std::uint64_t seed, const TimeGrid& grid, Point from, Point to);

/// s + kappa (n-m+1) / lambda^2
double lpp_cutoff(Point base, int n, double lambda, double kappa);

struct LbarResult {
  double value = kLogZero;
  double cutoff = 0.0;
  double tail_gap = kLogZero;  // (max over the last decade before the cutoff) - value
};

/// max over restricted endpoints x of L_{base,(n,x)} - Bbar_{n+1}(x) - lambda x.
/// The truncation policy threshold is read as e^{tail_gap} <= threshold.
LbarResult point_to_line_L(EnvView env, const BoundaryWeight& boundary, Point base, int n, Restriction restriction,
                           const TruncationPolicy& policy = {});
LbarResult point_to_line_L_from_slice(const LppSlice& slice, const TimeGrid& grid, const BoundaryWeight& boundary,
                                      Restriction restriction, double cutoff, double threshold);

/// q_N, f_N (N = 0..n_max, q[0] empty), Btilde_{N-1} = B_N - q_N and the
/// boundary field -f on the window that starts `horizon` after the grid start.
struct LppStationaryFields {
  double lambda = 1.0;
  int n_max = 0;
  double horizon = 0.0;
  TimeGrid grid;
  std::size_t window_start = 0;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> f;
  Environment tilde_B;
  Environment minus_f;
};

/// q_N(T) = max_{u in [t_min, T]} (B_N(u,T) + f_{N-1}(u,T) - lambda (T-u)) by the
/// Lindley recursion; f_N(T) = f_{N-1}(T) + q_N(0) - q_N(T). Time 0 must be on the window.
LppStationaryFields build_lpp_stationary_fields(const Environment& env, double lambda, int n_max, double horizon);

struct LppExactResiduals {
  double f_recursion = 0.0;
  double tilde_definition = 0.0;
};
LppExactResiduals check_lpp_exact_identities(const Environment& env, const LppStationaryFields& f);

struct LppBurkeReport {
  double lambda = 1.0;
  std::size_t n_env = 0;
  KsResult exp_ks{};  // q_1(0) vs Exp(lambda)
  double q_mean = 0.0;
  double q_mean_se = 0.0;
  KsResult tilde_ks{};  // Btilde_0(-1, 0) vs Normal(0, 1)
  std::vector<double> samples;
};

/// Same grid layout and seeding as the polymer Burke test.
LppBurkeReport lpp_burke_test(const BurkeConfig& cfg);

/// Both passage-time identities on (Btilde, -f).
RatioResiduals check_lpp_stationary_identities(const Environment& env, const LppStationaryFields& f,
                                               const std::vector<int>& n_list, double s, double t,
                                               const TruncationPolicy& policy);

/// Crossing comparison: same cases and gap convention as the polymer sandwich.
ComparisonGaps check_lpp_comparison(EnvView env, const BoundaryWeight& boundary, const ComparisonCase& c,
                                    const TruncationPolicy& policy);
std::vector<ComparisonGaps> check_lpp_comparison_levels(EnvView env, const BoundaryWeight& boundary,
                                                        const ComparisonCase& c, const TruncationPolicy& policy);

/// L_{x,(n,t_n)} - L_{y,(n,t_n)} per n.
BusemannEstimate busemann_difference_sequence(EnvView env, Point x, Point y, double theta,
                                              const std::vector<int>& n_list, EndpointRule rule);

struct ShapeReport {
  double t = 1.0;
  int n = 0;
  double target = 0.0;  // 2 sqrt(t)
  double mean = 0.0;
  double se = 0.0;
  double spread = 0.0;  // sample standard deviation
  std::vector<double> values;
};
/// n^{-1} L_{(0,0),(n,nt)} over environments.
ShapeReport shape_check(const std::vector<Environment>& envs, double t, int n);
/// Same over generated environments, streamed level by level.
ShapeReport shape_check(const std::vector<std::uint64_t>& seeds, const TimeGrid& grid, double t, int n,
                        int workers = 0);

/// gap(beta) = (1/beta)(log Z(beta B) - (n-m) log step) - L, per beta.
/// On the lattice 0 <= gap(beta) <= log C(K, n-m) / beta.
std::vector<double> zero_temperature_check(const Environment& env, Point from, Point to,
                                           const std::vector<double>& betas);

}  // namespace oy
