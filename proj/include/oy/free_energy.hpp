#pragma once

#include <limits>
#include <vector>

#include "oy/environment.hpp"
#include "oy/partition.hpp"

namespace oy {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// sup_{S <= t <= T} { p(t) - lambda t }. The maximizer is trigamma(lambda)
/// clamped to [S, T]; at the interior point the value is -digamma(lambda).
double restricted_target(double lambda, double s, double t);

struct RestrictedFreeEnergyReport {
  double lambda = 1.0;
  double S = 0.0, T = kUnbounded;
  std::vector<int> n_list;
  std::vector<std::vector<double>> values;  // [n index][environment] n^{-1} log Zbar(nS <= tau_n <= nT)
  std::vector<double> mean, se;
  double target = 0.0;
};

/// Endpoint window [nS, nT] from (0,0), boundary e^{-lambda x} only (or with
/// Bbar_{n+1} read from level n+1 of each environment when with_bar is set).
RestrictedFreeEnergyReport restricted_free_energy(const std::vector<Environment>& envs, double lambda, double S,
                                                  double T, const std::vector<int>& n_list,
                                                  const TruncationPolicy& policy, bool with_bar = false,
                                                  int workers = 0);

struct BoundaryVariantReport {
  RestrictedFreeEnergyReport with_bar, without_bar;
  std::vector<std::vector<double>> abs_difference;  // [n index][environment]
  double fraction_decreasing = 0.0;  // environments with |diff| at the last n below the first
};

BoundaryVariantReport unrestricted_variant(const std::vector<Environment>& envs, double lambda, double S, double T,
                                           const std::vector<int>& n_list, const TruncationPolicy& policy,
                                           int workers = 0);

/// log Z <= log(C(K, n) step^n) + L <= log(x^n / n!) + L, K = x / step.
struct MaximalEnergyBound {
  double log_Z = 0.0;
  double L = 0.0;
  double lattice_bound = 0.0;
  double continuum_bound = 0.0;
  double lattice_slack() const { return lattice_bound - log_Z; }
  double continuum_slack() const { return continuum_bound - log_Z; }
};

MaximalEnergyBound maximal_energy_bound_check(EnvView env, int n, double x);

/// n^{-1} log Z_{(0,0),(n, n theta)} per environment.
std::vector<double> point_to_point_free_energy(const std::vector<Environment>& envs, int n, double theta,
                                               int workers = 0);

/// Largest positive second difference of t -> p(t) - lambda t over the sorted points (<= 0 when concave).
double concavity_violation(double lambda, const std::vector<double>& t);

}  // namespace oy
