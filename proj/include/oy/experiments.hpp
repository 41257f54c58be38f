#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oy/config.hpp"
#include "oy/report.hpp"

namespace oy {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  int workers = 0;                     // 0: config value, then OpenMP default
  std::string out_dir;                 // empty: no artifacts written
};

const std::vector<std::string>& experiment_names();

/// Runs one experiment. Config errors surface as ConfigError naming the field.
Report run_experiment(const std::string& name, const Config& cfg, const RunOptions& opts = {});

/// tol(step) = reference * sqrt(step / reference_step)
struct ToleranceModel {
  double reference = 0.05;
  double reference_step = 0x1.0p-10;
  double exponent = 0.5;
  double at(double step) const;
  static ToleranceModel load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace oy
