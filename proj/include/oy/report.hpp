#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace oy {

inline constexpr int kReportSchema = 1;
inline constexpr const char* kArtifactVersion = "1.0.0";

/// Where a metric's target comes from.
enum class Provenance {
  Target,      // value predicted by the model under test
  Oracle,      // independent computation inside this artifact
  Diagnostic,  // reported only
};

struct Metric {
  enum class Relation { None, Within, AtMost, AtLeast };
  double value = 0.0;
  std::optional<double> target;
  std::optional<double> tolerance;
  Relation relation = Relation::None;
  Provenance provenance = Provenance::Diagnostic;
  std::string note;

  /// |value - target| <= tolerance
  static Metric within(double value, double target, double tolerance, Provenance p);
  /// value <= bound
  static Metric at_most(double value, double bound, Provenance p);
  /// value >= bound
  static Metric at_least(double value, double bound, Provenance p);
  static Metric diagnostic(double value);

  bool gated() const { return relation != Relation::None; }
  bool passed() const;
};

class Report {
 public:
  Report(std::string experiment, std::uint64_t seed, std::map<std::string, std::string> config);

  /// Metrics are keyed; re-adding a name replaces it.
  void add(const std::string& name, Metric m);
  void add_table(const std::string& name, nlohmann::json table);
  void set_wall_clock(double seconds) { wall_clock_ = seconds; }

  bool passed() const;
  std::vector<std::string> failures() const;
  const std::map<std::string, Metric>& metrics() const { return metrics_; }
  const Metric& metric(const std::string& name) const;
  const std::string& experiment() const { return experiment_; }
  std::uint64_t seed() const { return seed_; }

  nlohmann::json to_json() const;
  /// Writes <dir>/<experiment>.json.
  std::string write(const std::string& dir) const;

 private:
  std::string experiment_;
  std::uint64_t seed_;
  std::map<std::string, std::string> config_;
  std::map<std::string, Metric> metrics_;
  std::map<std::string, nlohmann::json> tables_;
  double wall_clock_ = 0.0;
};

}  // namespace oy
