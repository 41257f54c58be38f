#include "oy/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace oy {

Metric Metric::within(double value, double target, double tolerance, Provenance p) {
  return {value, target, tolerance, Relation::Within, p, {}};
}

Metric Metric::at_most(double value, double bound, Provenance p) {
  return {value, bound, std::nullopt, Relation::AtMost, p, {}};
}

Metric Metric::at_least(double value, double bound, Provenance p) {
  return {value, bound, std::nullopt, Relation::AtLeast, p, {}};
}

Metric Metric::diagnostic(double value) { return {value, std::nullopt, std::nullopt, Relation::None, {}, {}}; }

bool Metric::passed() const {
  if (std::isnan(value)) return false;
  switch (relation) {
    case Relation::None:
      return true;
    case Relation::Within:
      return std::abs(value - *target) <= *tolerance;
    case Relation::AtMost:
      return value <= *target;
    case Relation::AtLeast:
      return value >= *target;
  }
  return false;
}

Report::Report(std::string experiment, std::uint64_t seed, std::map<std::string, std::string> config)
    : experiment_(std::move(experiment)), seed_(seed), config_(std::move(config)) {}

void Report::add(const std::string& name, Metric m) { metrics_[name] = std::move(m); }

void Report::add_table(const std::string& name, nlohmann::json table) { tables_[name] = std::move(table); }

bool Report::passed() const { return failures().empty(); }

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& [name, m] : metrics_)
    if (m.gated() && !m.passed()) out.push_back(name);
  return out;
}

const Metric& Report::metric(const std::string& name) const {
  const auto it = metrics_.find(name);
  if (it == metrics_.end()) throw std::out_of_range("report has no metric '" + name + "'");
  return it->second;
}

namespace {

const char* relation_name(Metric::Relation r) {
  switch (r) {
    case Metric::Relation::None: return "none";
    case Metric::Relation::Within: return "abs_diff_le";
    case Metric::Relation::AtMost: return "le";
    case Metric::Relation::AtLeast: return "ge";
  }
  return "none";
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Target: return "model_target";
    case Provenance::Oracle: return "oracle";
    case Provenance::Diagnostic: return "diagnostic";
  }
  return "diagnostic";
}

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["schema_version"] = kReportSchema;
  j["artifact_version"] = kArtifactVersion;
  j["experiment"] = experiment_;
  j["seed"] = seed_;
  j["config"] = config_;
  j["wall_clock_seconds"] = wall_clock_;
  j["passed"] = passed();
  nlohmann::json ms = nlohmann::json::object();
  for (const auto& [name, m] : metrics_) {
    nlohmann::json r;
    r["value"] = number(m.value);
    r["target"] = m.target ? number(*m.target) : nlohmann::json(nullptr);
    r["tolerance"] = m.tolerance ? number(*m.tolerance) : nlohmann::json(nullptr);
    r["relation"] = relation_name(m.relation);
    r["passed"] = m.gated() ? nlohmann::json(m.passed()) : nlohmann::json(nullptr);
    r["provenance"] = provenance_name(m.gated() ? m.provenance : Provenance::Diagnostic);
    if (!m.note.empty()) r["note"] = m.note;
    ms[name] = r;
  }
  j["metrics"] = ms;
  j["tables"] = tables_;
  return j;
}

std::string Report::write(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / (experiment_ + ".json")).string();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report '" + path + "'");
  out << to_json().dump(2) << '\n';
  return path;
}

}  // namespace oy
