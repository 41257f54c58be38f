#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oy/experiments.hpp"

namespace {

std::optional<std::string> env_value(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-discrete Brownian polymer and last-passage experiments"};
  std::string experiment, config_path, out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string names;
  for (const auto& n : oy::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed (overrides OY_SEED and the config)");
  app.add_option("--workers", workers, "worker threads (overrides OY_WORKERS and the config)");
  app.add_option("--out", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    oy::RunOptions opts;
    opts.out_dir = out_dir;
    if (seed) {
      opts.seed = *seed;
    } else if (auto s = env_value("OY_SEED")) {
      opts.seed = std::stoull(*s);
    }
    if (workers) {
      opts.workers = *workers;
    } else if (auto w = env_value("OY_WORKERS")) {
      opts.workers = std::stoi(*w);
    }
    if (opts.workers < 0) throw oy::ConfigError("--workers must be non-negative");
    const oy::Config cfg = oy::Config::load(config_path);
    const oy::Report rep = oy::run_experiment(experiment, cfg, opts);
    for (const auto& [name, m] : rep.metrics()) {
      std::cout << (m.gated() ? (m.passed() ? "PASS " : "FAIL ") : "     ") << name << " = " << m.value;
      if (m.target) std::cout << "  target " << *m.target;
      if (m.tolerance) std::cout << "  tol " << *m.tolerance;
      std::cout << '\n';
    }
    std::cout << experiment << ": " << (rep.passed() ? "passed" : "FAILED") << " (seed " << rep.seed() << ", "
              << out_dir << "/" << experiment << ".json)\n";
    return rep.passed() ? 0 : 1;
  } catch (const oy::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
