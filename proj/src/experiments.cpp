#include "oy/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "oy/busemann.hpp"
#include "oy/environment.hpp"
#include "oy/free_energy.hpp"
#include "oy/lpp.hpp"
#include "oy/numerics.hpp"
#include "oy/parallel.hpp"
#include "oy/partition.hpp"
#include "oy/paths.hpp"
#include "oy/rng.hpp"
#include "oy/stationary.hpp"
#include "oy/stats.hpp"

namespace oy {

double ToleranceModel::at(double step) const { return reference * std::pow(step / reference_step, exponent); }

ToleranceModel ToleranceModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tolerance file '" + path + "'");
  const auto j = nlohmann::json::parse(in);
  ToleranceModel m;
  m.reference = j.at("reference").get<double>();
  m.reference_step = j.at("reference_step").get<double>();
  m.exponent = j.at("exponent").get<double>();
  return m;
}

void ToleranceModel::save(const std::string& path) const {
  std::ofstream out(path);
  out << nlohmann::json{{"reference", reference}, {"reference_step", reference_step}, {"exponent", exponent}}.dump(2)
      << '\n';
}

namespace {

const std::vector<std::string> kCommon = {"experiment", "seed", "workers"};

struct Ctx {
  const Config& cfg;
  std::uint64_t seed;
  int workers;
  std::string out;
};

std::vector<std::string> keys(std::vector<std::string> extra) {
  extra.insert(extra.end(), kCommon.begin(), kCommon.end());
  return extra;
}

double positive(const Config& cfg, const std::string& key, double fallback) {
  const double v = cfg.get_double(key, fallback);
  if (!(v > 0.0)) throw ConfigError(cfg.locate(key) + ": must be positive");
  return v;
}

std::size_t count(const Config& cfg, const std::string& key, long long fallback) {
  const long long v = cfg.get_int(key, fallback);
  if (v < 1) throw ConfigError(cfg.locate(key) + ": must be at least 1");
  return static_cast<std::size_t>(v);
}

double grid_step(const Config& cfg, double fallback = 0x1.0p-8) {
  const double step = positive(cfg, "grid.step", fallback);
  if (step > 1.0) throw ConfigError(cfg.locate("grid.step") + ": step above 1 is not supported");
  return step;
}

bool on_grid(double t, double step) { return std::abs(t / step - std::round(t / step)) < 1e-9; }

double aligned(const Config& cfg, const std::string& key, double step, double fallback) {
  const double t = cfg.get_double(key, fallback);
  if (!on_grid(t, step)) {
    std::ostringstream msg;
    msg << cfg.locate(key) << ": " << t << " is not a multiple of grid.step = " << step;
    throw ConfigError(msg.str());
  }
  return t;
}

std::vector<int> level_list(const Config& cfg, const std::string& key, std::vector<int> fallback, int lowest) {
  auto v = cfg.get_ints(key, fallback);
  for (int n : v)
    if (n < lowest) throw ConfigError(cfg.locate(key) + ": entries must be at least " + std::to_string(lowest));
  if (!std::is_sorted(v.begin(), v.end())) throw ConfigError(cfg.locate(key) + ": must be increasing");
  return v;
}

double ceil_to(double x, double step) { return std::ceil(x / step - 1e-9) * step; }

void write_file(const Ctx& c, const std::string& name, const std::function<void(std::ostream&)>& body) {
  if (c.out.empty()) return;
  std::filesystem::create_directories(c.out);
  std::ofstream os(std::filesystem::path(c.out) / name);
  if (!os) throw std::runtime_error("cannot write " + name);
  os.precision(17);
  body(os);
}

double fraction(const std::vector<char>& flags) {
  if (flags.empty()) return 0.0;
  return static_cast<double>(std::count(flags.begin(), flags.end(), 1)) / static_cast<double>(flags.size());
}

Metric noted(Metric m, std::string note) {
  m.note = std::move(note);
  return m;
}

TruncationPolicy policy_from(const Config& cfg, double kappa) {
  TruncationPolicy p;
  p.kappa = positive(cfg, "truncation.kappa", kappa);
  p.threshold = positive(cfg, "truncation.threshold", 1e-3);
  return p;
}

// ---------------------------------------------------------------- burke

void run_burke(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"model.lambda", "grid.step", "sizes.n_env", "truncation.horizon", "burke.t_after",
                            "burke.check_levels", "burke.t2"}));
  BurkeConfig b;
  b.lambda = positive(c.cfg, "model.lambda", 1.0);
  b.step = grid_step(c.cfg);
  b.n_env = count(c.cfg, "sizes.n_env", 1000);
  b.horizon = c.cfg.get_double("truncation.horizon", 0.0);
  b.t_after = positive(c.cfg, "burke.t_after", 4.0);
  b.check_levels = level_list(c.cfg, "burke.check_levels", {0, 1}, 0);
  b.t2 = aligned(c.cfg, "burke.t2", b.step, -1.0);
  if (b.t2 > 0.0) throw ConfigError(c.cfg.locate("burke.t2") + ": must be <= 0");
  b.seed = c.seed;
  b.workers = c.workers;
  const BurkeReport r = burke_tests(b);
  rep.add("gamma_ks", noted(Metric::at_most(r.gamma_ks.statistic, r.gamma_ks.critical, Provenance::Target),
                            "exp(-r_1(0)) vs Gamma(lambda,1), alpha=0.01"));
  rep.add("gamma_mean", noted(Metric::within(r.gamma_mean, b.lambda, 3.0 * r.gamma_mean_se, Provenance::Target),
                              "3 standard errors"));
  for (std::size_t i = 0; i < r.check_ks.size(); ++i)
    rep.add("check_ks_level" + std::to_string(r.check_levels[i]),
            noted(Metric::at_most(r.check_ks[i].statistic, r.check_ks[i].critical, Provenance::Target),
                  "Bcheck(t-1,t) vs Normal(0,1)"));
  for (const auto& cr : r.correlations)
    rep.add("corr[" + cr.a + "," + cr.b + "]", Metric::at_most(std::abs(cr.value), cr.band, Provenance::Target));
  write_file(c, "burke_samples.csv", [&](std::ostream& os) {
    os << "env,exp_minus_r1\n";
    for (std::size_t e = 0; e < r.samples.size(); ++e) os << e << ',' << r.samples[e] << '\n';
  });
}

void run_lpp_burke(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"model.lambda", "grid.step", "sizes.n_env", "truncation.horizon", "burke.t_after"}));
  BurkeConfig b;
  b.lambda = positive(c.cfg, "model.lambda", 1.0);
  b.step = grid_step(c.cfg);
  b.n_env = count(c.cfg, "sizes.n_env", 1000);
  b.horizon = c.cfg.get_double("truncation.horizon", 0.0);
  b.t_after = positive(c.cfg, "burke.t_after", 1.0);
  b.seed = c.seed;
  b.workers = c.workers;
  const LppBurkeReport r = lpp_burke_test(b);
  rep.add("exp_ks", noted(Metric::at_most(r.exp_ks.statistic, r.exp_ks.critical, Provenance::Target),
                          "q_1(0) vs Exp(lambda), alpha=0.01"));
  rep.add("q_mean", noted(Metric::within(r.q_mean, 1.0 / b.lambda, 3.0 * r.q_mean_se, Provenance::Target),
                          "3 standard errors"));
  rep.add("tilde_ks", noted(Metric::at_most(r.tilde_ks.statistic, r.tilde_ks.critical, Provenance::Target),
                            "Btilde_0(-1,0) vs Normal(0,1)"));
  const double atom = static_cast<double>(std::count(r.samples.begin(), r.samples.end(), 0.0)) / r.samples.size();
  rep.add("q_atom_at_zero", noted(Metric::diagnostic(atom), "grid-monitored supremum; the continuum law has no atom"));
  write_file(c, "lpp_burke_samples.csv", [&](std::ostream& os) {
    os << "env,q1\n";
    for (std::size_t e = 0; e < r.samples.size(); ++e) os << e << ',' << r.samples[e] << '\n';
  });
}

// ---------------------------------------------------------------- stationary identities

struct IdentityRows {
  double g_recursion = 0, check_definition = 0, telescoping = 0, f_recursion = 0, tilde_definition = 0;
  double ratio_horizontal = 0, ratio_vertical = 0, ratio_spread = 0, involution = 0;
  double lpp_horizontal = 0, lpp_vertical = 0;
};

struct IdentitySetup {
  double lambda = 1.0;
  std::vector<int> n_list;
  double s = 0.0, t = 1.0;
  TruncationPolicy policy;
  double horizon = 0.0;
  double forward = 0.0;

  int n_max() const { return n_list.back() + 1; }
  // end points are multiples of `align` so coarsened grids keep them
  TimeGrid grid(double step, double align) const {
    return TimeGrid(-ceil_to(horizon - std::min(0.0, s), align), ceil_to(t + forward, align), step);
  }
};

IdentitySetup identity_setup(const Ctx& c, double step) {
  IdentitySetup su;
  su.lambda = positive(c.cfg, "model.lambda", 1.0);
  su.n_list = level_list(c.cfg, "sizes.n_list", {1, 2, 3}, 1);
  su.s = aligned(c.cfg, "points.s", step, 0.0);
  su.t = aligned(c.cfg, "points.t", step, 1.0);
  if (!(su.s < su.t)) throw ConfigError(c.cfg.locate("points.t") + ": need points.s < points.t");
  su.policy = policy_from(c.cfg, 30.0);
  su.horizon = c.cfg.get_double("truncation.horizon", default_horizon(su.lambda));
  if (su.lambda * su.horizon < 30.0) throw ConfigError(c.cfg.locate("truncation.horizon") + ": need lambda * H >= 30");
  su.forward = su.policy.kappa * (su.n_max() + 1) * std::max(trigamma(su.lambda), 1.0 / (su.lambda * su.lambda)) + 1.0;
  return su;
}

IdentityRows identity_rows(const Environment& env, const IdentitySetup& su) {
  IdentityRows r;
  const auto f = build_stationary_fields(env, su.lambda, su.n_max(), su.horizon);
  const auto ex = check_exact_identities(env, f);
  r.g_recursion = ex.g_recursion;
  r.check_definition = ex.check_definition;
  r.telescoping = ex.telescoping;
  const auto rr = check_stationary_ratio(env, f, su.n_list, su.s, su.t, su.policy);
  for (double v : rr.horizontal) r.ratio_horizontal = std::max(r.ratio_horizontal, std::abs(v));
  for (double v : rr.vertical) r.ratio_vertical = std::max(r.ratio_vertical, std::abs(v));
  r.ratio_spread = std::max(rr.horizontal_spread, rr.vertical_spread);
  const double fwd = su.policy.kappa * trigamma(su.lambda) * 2.0;
  for (int n : su.n_list)
    r.involution =
        std::max(r.involution, check_involution(f, n, su.t, std::min(fwd, su.forward), su.policy.threshold).residual);
  const auto lf = build_lpp_stationary_fields(env, su.lambda, su.n_max(), su.horizon);
  const auto lx = check_lpp_exact_identities(env, lf);
  r.f_recursion = lx.f_recursion;
  r.tilde_definition = lx.tilde_definition;
  const auto lr = check_lpp_stationary_identities(env, lf, su.n_list, su.s, su.t, su.policy);
  for (double v : lr.horizontal) r.lpp_horizontal = std::max(r.lpp_horizontal, std::abs(v));
  for (double v : lr.vertical) r.lpp_vertical = std::max(r.lpp_vertical, std::abs(v));
  return r;
}

using RowGetter = double IdentityRows::*;
const std::vector<std::pair<std::string, RowGetter>> kExactRows = {
    {"g_recursion", &IdentityRows::g_recursion},
    {"check_definition", &IdentityRows::check_definition},
    {"telescoping", &IdentityRows::telescoping},
    {"lpp_f_recursion", &IdentityRows::f_recursion},
    {"lpp_tilde_definition", &IdentityRows::tilde_definition}};
const std::vector<std::pair<std::string, RowGetter>> kQuadratureRows = {
    {"ratio_horizontal", &IdentityRows::ratio_horizontal},
    {"ratio_vertical", &IdentityRows::ratio_vertical},
    {"ratio_spread", &IdentityRows::ratio_spread},
    {"involution", &IdentityRows::involution}};
const std::vector<std::pair<std::string, RowGetter>> kLppRows = {{"lpp_horizontal", &IdentityRows::lpp_horizontal},
                                                                 {"lpp_vertical", &IdentityRows::lpp_vertical}};

const std::vector<std::string> kIdentityKeys = {"model.lambda",       "grid.step",           "sizes.n_env",
                                                "sizes.n_list",       "points.s",            "points.t",
                                                "truncation.kappa",   "truncation.threshold", "truncation.horizon",
                                                "tolerance.reference", "tolerance.reference_step",
                                                "tolerance.source"};

ToleranceModel tolerance_from(const Config& cfg) {
  if (cfg.has("tolerance.source")) return ToleranceModel::load(cfg.get_string("tolerance.source"));
  ToleranceModel m;
  m.reference = positive(cfg, "tolerance.reference", 0.05);
  m.reference_step = positive(cfg, "tolerance.reference_step", 0x1.0p-10);
  return m;
}

void run_stationary_ratio(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys(kIdentityKeys));
  const double step = grid_step(c.cfg, 0x1.0p-10);
  const IdentitySetup su = identity_setup(c, step);
  const std::size_t n_env = count(c.cfg, "sizes.n_env", 8);
  const ToleranceModel tol = tolerance_from(c.cfg);
  const TimeGrid grid = su.grid(step, 1.0);
  std::vector<IdentityRows> rows(n_env);
  parallel_for(n_env, c.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(c.seed, e), grid, 0, su.n_max());
    rows[e] = identity_rows(env, su);
  });
  auto worst = [&](RowGetter g) {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.*g);
    return m;
  };
  for (const auto& [name, g] : kExactRows) rep.add(name, Metric::at_most(worst(g), 1e-10, Provenance::Target));
  for (const auto& [name, g] : kQuadratureRows)
    rep.add(name, noted(Metric::at_most(worst(g), tol.at(step), Provenance::Target), "max over environments"));
  for (const auto& [name, g] : kLppRows) rep.add(name, Metric::diagnostic(worst(g)));
  write_file(c, "stationary_ratio.csv", [&](std::ostream& os) {
    os << "env,ratio_horizontal,ratio_vertical,ratio_spread,involution,lpp_horizontal,lpp_vertical\n";
    for (std::size_t e = 0; e < rows.size(); ++e)
      os << e << ',' << rows[e].ratio_horizontal << ',' << rows[e].ratio_vertical << ',' << rows[e].ratio_spread
         << ',' << rows[e].involution << ',' << rows[e].lpp_horizontal << ',' << rows[e].lpp_vertical << '\n';
  });
}

void run_refine(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"model.lambda", "grid.steps", "sizes.n_env", "sizes.n_list", "points.s", "points.t",
                            "truncation.kappa", "truncation.threshold", "truncation.horizon", "tolerance.reference",
                            "tolerance.min_slope"}));
  std::vector<double> steps = c.cfg.get_doubles("grid.steps", {0x1.0p-6, 0x1.0p-7, 0x1.0p-8, 0x1.0p-9, 0x1.0p-10});
  for (std::size_t i = 1; i < steps.size(); ++i)
    if (std::abs(steps[i - 1] / steps[i] - 2.0) > 1e-12)
      throw ConfigError(c.cfg.locate("grid.steps") + ": steps must descend by factors of 2");
  if (steps.size() < 2) throw ConfigError(c.cfg.locate("grid.steps") + ": need at least two steps");
  const double finest = steps.back();
  const IdentitySetup su = identity_setup(c, steps.front());
  const std::size_t n_env = count(c.cfg, "sizes.n_env", 8);
  ToleranceModel tol;
  tol.reference = positive(c.cfg, "tolerance.reference", 0.05);
  tol.reference_step = finest;
  const double min_slope = c.cfg.get_double("tolerance.min_slope", 0.4);

  // one Brownian sample per environment on the finest grid, coarsened for the others
  const TimeGrid fine = su.grid(finest, steps.front());
  std::vector<std::vector<IdentityRows>> rows(steps.size(), std::vector<IdentityRows>(n_env));
  parallel_for(n_env, c.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(c.seed, e), fine, 0, su.n_max());
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const auto factor = static_cast<std::size_t>(std::llround(steps[i] / finest));
      rows[i][e] = identity_rows(factor == 1 ? env : env.coarsen(factor), su);
    }
  });

  nlohmann::json table = nlohmann::json::array();
  std::vector<double> log_steps;
  for (double s : steps) log_steps.push_back(std::log(s));
  auto summarize = [&](const std::string& name, RowGetter g, bool quadrature, bool gated) {
    std::vector<double> means, maxes;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      double sum = 0.0, mx = 0.0;
      for (const auto& r : rows[i]) {
        sum += r.*g;
        mx = std::max(mx, r.*g);
      }
      means.push_back(sum / n_env);
      maxes.push_back(mx);
      table.push_back({{"row", name}, {"step", steps[i]}, {"mean", means.back()}, {"max", mx},
                       {"tolerance", quadrature ? tol.at(steps[i]) : 1e-10}});
    }
    if (!quadrature) {
      rep.add(name + "_max", Metric::at_most(*std::max_element(maxes.begin(), maxes.end()), 1e-10,
                                             Provenance::Target));
      return;
    }
    std::vector<double> log_means;
    for (double m : means) log_means.push_back(std::log(std::max(m, 1e-300)));
    const double slope = fit_slope(log_steps, log_means);
    bool monotone = true;
    for (std::size_t i = 1; i < means.size(); ++i) monotone = monotone && means[i] <= means[i - 1];
    if (gated) {
      for (std::size_t i = 0; i < steps.size(); ++i) {
        std::ostringstream key;
        key << name << "_max@2^" << std::lround(std::log2(steps[i]));
        rep.add(key.str(), Metric::at_most(maxes[i], tol.at(steps[i]), Provenance::Target));
      }
      rep.add(name + "_slope", noted(Metric::at_least(slope, min_slope, Provenance::Target),
                                     "log-log slope of the mean residual against the step"));
    } else {
      rep.add(name + "_slope", Metric::diagnostic(slope));
      rep.add(name + "_max@finest", Metric::diagnostic(maxes.back()));
    }
    rep.add(name + "_monotone", Metric::diagnostic(monotone ? 1.0 : 0.0));
  };
  for (const auto& [name, g] : kExactRows) summarize(name, g, false, true);
  for (const auto& [name, g] : kQuadratureRows) summarize(name, g, true, true);
  for (const auto& [name, g] : kLppRows) summarize(name, g, true, false);
  rep.add("tolerance_at_finest", Metric::at_most(tol.at(finest), 0.05, Provenance::Target));
  rep.add_table("refinement", table);
  write_file(c, "refine.csv", [&](std::ostream& os) {
    os << "row,step,mean,max,tolerance\n";
    for (const auto& r : table)
      os << r["row"].get<std::string>() << ',' << r["step"].get<double>() << ',' << r["mean"].get<double>() << ','
         << r["max"].get<double>() << ',' << r["tolerance"].get<double>() << '\n';
  });
  if (!c.out.empty()) tol.save((std::filesystem::path(c.out) / "tolerance.json").string());
}

// ---------------------------------------------------------------- comparison

void run_comparison(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"model.lambdas", "grid.step", "sizes.n_env", "sizes.n_max", "truncation.kappa",
                            "truncation.threshold", "comparison.vertical_t", "comparison.horizontal_s",
                            "comparison.horizontal_t", "comparison.horizontal_T"}));
  const double step = grid_step(c.cfg);
  const auto lambdas = c.cfg.get_doubles("model.lambdas", {0.5, 1.0, 2.0});
  for (double l : lambdas)
    if (!(l > 0.0)) throw ConfigError(c.cfg.locate("model.lambdas") + ": must be positive");
  const std::size_t n_env = count(c.cfg, "sizes.n_env", 100);
  const int n_max = static_cast<int>(count(c.cfg, "sizes.n_max", 8));
  const TruncationPolicy policy = policy_from(c.cfg, 8.0);
  const double vt = aligned(c.cfg, "comparison.vertical_t", step, 1.0);
  const double hs = aligned(c.cfg, "comparison.horizontal_s", step, 0.0);
  const double ht = aligned(c.cfg, "comparison.horizontal_t", step, 1.0);
  const double hT = aligned(c.cfg, "comparison.horizontal_T", step, 2.0);
  if (!(vt > 0.0)) throw ConfigError(c.cfg.locate("comparison.vertical_t") + ": must be positive");
  if (!(0.0 <= hs && hs < ht && ht < hT))
    throw ConfigError(c.cfg.locate("comparison.horizontal_T") + ": need 0 <= s < t < T");

  // per (environment, lambda): worst gap over levels, cases and sides
  const std::size_t cells = n_env * lambdas.size();
  std::vector<double> poly(cells), lpp(cells);
  parallel_for(cells, c.workers, [&](std::size_t i) {
    const std::size_t e = i / lambdas.size();
    const double lambda = lambdas[i % lambdas.size()];
    const double reach = policy.kappa * (n_max + 1) * std::max(trigamma(lambda), 1.0 / (lambda * lambda));
    const TimeGrid grid(0.0, ceil_to(std::max(reach, hT) + 1.0, step), step);
    // level n_max + 1 is the boundary field Bbar, independent of levels 0..n_max
    const Environment env = Environment::generate(derive_seed(c.seed, e), grid, 0, n_max + 1);
    const BoundaryWeight bw = BoundaryWeight::from(lambda, env);
    ComparisonCase vertical{ComparisonCase::Kind::Vertical, n_max, 0.0, vt, 0.0};
    ComparisonCase horizontal{ComparisonCase::Kind::Horizontal, n_max, hs, ht, hT};
    double wp = kUnbounded, wl = kUnbounded;
    for (const auto& cc : {vertical, horizontal}) {
      for (const auto& gaps : check_comparison_levels(env, bw, cc, policy))
        wp = std::min({wp, gaps.left_gap(), gaps.right_gap()});
      for (const auto& gaps : check_lpp_comparison_levels(env, bw, cc, policy))
        wl = std::min({wl, gaps.left_gap(), gaps.right_gap()});
    }
    poly[i] = wp;
    lpp[i] = wl;
  });
  const double eps = 1e-9;
  auto held = [&](const std::vector<double>& v) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double g) { return g >= -eps; }));
  };
  rep.add("polymer_min_gap", noted(Metric::at_least(*std::min_element(poly.begin(), poly.end()), -eps,
                                                    Provenance::Target),
                                   "log slack, all levels, both sandwiches"));
  rep.add("lpp_min_gap", noted(Metric::at_least(*std::min_element(lpp.begin(), lpp.end()), -eps, Provenance::Target),
                               "length slack, all levels, both sandwiches"));
  rep.add("polymer_trials_held", Metric::diagnostic(held(poly)));
  rep.add("lpp_trials_held", Metric::diagnostic(held(lpp)));
  rep.add("trials", Metric::diagnostic(static_cast<double>(cells)));
  write_file(c, "comparison.csv", [&](std::ostream& os) {
    os << "env,lambda,polymer_min_gap,lpp_min_gap\n";
    for (std::size_t i = 0; i < cells; ++i)
      os << i / lambdas.size() << ',' << lambdas[i % lambdas.size()] << ',' << poly[i] << ',' << lpp[i] << '\n';
  });
}

// ---------------------------------------------------------------- busemann

struct PairStats {
  std::vector<char> decrease, agree, agree_max, trend;
  std::vector<double> estimate;
  double cocycle = 0.0;
};

// mean |successive difference| over the last quarter of the n range is no
// larger than over the first quarter (consecutive n)
bool trend_decreases(const std::vector<PartitionSlice>& fx, const std::vector<PartitionSlice>& fy,
                     const TimeGrid& g, double theta, int n_lo, int n_hi) {
  std::vector<int> all;
  for (int n = n_lo; n <= n_hi; ++n) all.push_back(n);
  const auto est = sequence_from_slices(fx, fy, g, theta, all, EndpointRule::Linear);
  const auto d = est.successive_differences();
  const std::size_t q = std::max<std::size_t>(1, (d.size() - 1) / 4);
  double first = 0.0, last = 0.0;
  for (std::size_t i = 1; i <= q; ++i) first += d[i];
  for (std::size_t i = d.size() - q; i < d.size(); ++i) last += d[i];
  return last <= first + 1e-9;
}

void run_busemann(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"model.theta", "grid.step", "sizes.n_env", "sizes.n_list", "busemann.fraction"}));
  const double step = grid_step(c.cfg);
  const double theta = snap_theta(positive(c.cfg, "model.theta", 1.0), step);
  const std::size_t n_env = count(c.cfg, "sizes.n_env", 200);
  const auto n_list = level_list(c.cfg, "sizes.n_list", {8, 16, 32, 64}, 2);
  if (n_list.size() < 3) throw ConfigError(c.cfg.locate("sizes.n_list") + ": need at least three entries");
  const double need = c.cfg.get_double("busemann.fraction", 0.8);
  const int n_max = n_list.back();
  const double t_end = std::max(endpoint_time(n_max, theta, EndpointRule::LinearPlusSqrt, step), n_max * theta);
  const TimeGrid grid(0.0, ceil_to(t_end, step), step);
  const Point x{0, 0.0}, yv{1, 0.0}, yh{0, 1.0};
  if (!on_grid(1.0, step)) throw ConfigError(c.cfg.locate("grid.step") + ": time 1 must be on the grid");

  // pairs: polymer vertical, polymer horizontal, lpp vertical, lpp horizontal
  const std::vector<std::string> names = {"polymer_vertical", "polymer_horizontal", "lpp_vertical", "lpp_horizontal"};
  std::vector<PairStats> stats(4);
  for (auto& s : stats) {
    s.decrease.assign(n_env, 0);
    s.agree.assign(n_env, 0);
    s.agree_max.assign(n_env, 0);
    s.trend.assign(n_env, 0);
    s.estimate.assign(n_env, 0.0);
  }
  std::vector<double> cocycle_poly(n_env), cocycle_lpp(n_env);
  parallel_for(n_env, c.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(c.seed, e), grid, 0, n_max);
    for (int model = 0; model < 2; ++model) {
      auto slices = [&](Point p) { return model == 0 ? forward_slices(env, p, n_max) : lpp_slices(env, p, n_max); };
      const auto sx = slices(x), sv = slices(yv), sh = slices(yh);
      const std::vector<const std::vector<PartitionSlice>*> ys = {&sv, &sh};
      for (int pair = 0; pair < 2; ++pair) {
        PairStats& ps = stats[2 * model + pair];
        const auto a = sequence_from_slices(sx, *ys[pair], grid, theta, n_list, EndpointRule::Linear);
        const auto b = sequence_from_slices(sx, *ys[pair], grid, theta, n_list, EndpointRule::LinearPlusSqrt);
        ps.decrease[e] = a.differences_decrease();
        const double diff = std::abs(a.estimate() - b.estimate());
        ps.agree[e] = diff <= a.error_bar() + b.error_bar();
        ps.agree_max[e] = diff <= std::max(a.error_bar(), b.error_bar());
        ps.trend[e] = trend_decreases(sx, *ys[pair], grid, theta, n_list[1], n_max);
        ps.estimate[e] = a.estimate();
      }
      const auto xy = sequence_from_slices(sx, sv, grid, theta, n_list, EndpointRule::Linear);
      const auto yz = sequence_from_slices(sv, sh, grid, theta, n_list, EndpointRule::Linear);
      const auto xz = sequence_from_slices(sx, sh, grid, theta, n_list, EndpointRule::Linear);
      const auto res = check_cocycle(xy, yz, xz);
      (model == 0 ? cocycle_poly : cocycle_lpp)[e] = *std::max_element(res.begin(), res.end());
    }
  });
  std::ostringstream span;
  span << "|d(n=" << n_list.back() << ")| <= |d(n=" << n_list[1] << ")|";
  for (std::size_t i = 0; i < 4; ++i) {
    rep.add(names[i] + "_decrease_fraction",
            noted(Metric::at_least(fraction(stats[i].decrease), need, Provenance::Target), span.str()));
    rep.add(names[i] + "_rule_agreement",
            noted(Metric::at_least(fraction(stats[i].agree), need, Provenance::Target),
                  "|a - b| within the sum of the two Cauchy error bars"));
    rep.add(names[i] + "_rule_agreement_max_bar", Metric::diagnostic(fraction(stats[i].agree_max)));
    rep.add(names[i] + "_trend_fraction", noted(Metric::diagnostic(fraction(stats[i].trend)),
                                                "quarter-range means of consecutive-n differences"));
    rep.add(names[i] + "_mean_estimate", Metric::diagnostic(mean(stats[i].estimate)));
  }
  const double lambda_theta = inverse_trigamma(theta);
  rep.add("polymer_vertical_mean_target", noted(Metric::diagnostic(-digamma(lambda_theta)),
                                               "E r_1 = -digamma(lambda_theta) in the limit"));
  rep.add("polymer_cocycle", Metric::at_most(*std::max_element(cocycle_poly.begin(), cocycle_poly.end()), 1e-10,
                                             Provenance::Target));
  rep.add("lpp_cocycle", Metric::at_most(*std::max_element(cocycle_lpp.begin(), cocycle_lpp.end()), 1e-10,
                                         Provenance::Target));
  write_file(c, "busemann.csv", [&](std::ostream& os) {
    os << "env";
    for (const auto& n : names) os << ',' << n << "_estimate," << n << "_decrease," << n << "_agree";
    os << '\n';
    for (std::size_t e = 0; e < n_env; ++e) {
      os << e;
      for (const auto& s : stats) os << ',' << s.estimate[e] << ',' << int(s.decrease[e]) << ',' << int(s.agree[e]);
      os << '\n';
    }
  });
}

void run_busemann_dist(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"model.theta", "grid.step", "sizes.n_env", "sizes.n_star", "busemann.t",
                            "busemann.ks_max"}));
  LimitConfig lc;
  lc.step = grid_step(c.cfg);
  lc.theta = positive(c.cfg, "model.theta", trigamma(1.0));
  lc.n_env = count(c.cfg, "sizes.n_env", 500);
  lc.n_star = static_cast<int>(count(c.cfg, "sizes.n_star", 64));
  lc.t = aligned(c.cfg, "busemann.t", lc.step, 1.0);
  lc.seed = c.seed;
  lc.workers = c.workers;
  const double ks_max = c.cfg.get_double("busemann.ks_max", 0.10);
  const LimitReport r = limiting_distribution_test(lc);
  rep.add("lambda_theta", Metric::diagnostic(r.lambda_theta));
  rep.add("vertical_ks", noted(Metric::at_most(r.vertical_ks.statistic, ks_max, Provenance::Target),
                               "exp(-vertical log ratio) vs Gamma(lambda_theta,1); finite-n calibrated bound"));
  rep.add("vertical_ks_critical", Metric::diagnostic(r.vertical_ks.critical));
  rep.add("vertical_fitted_shape", Metric::diagnostic(r.vertical_shape_fit));
  rep.add("horizontal_mean", noted(Metric::within(r.horizontal_mean, r.horizontal_target, 3.0 * r.horizontal_se,
                                                  Provenance::Target),
                                   "target -lambda_theta t, 3 standard errors"));
  rep.add("horizontal_ks", Metric::diagnostic(r.horizontal_ks.statistic));
  write_file(c, "busemann_dist.csv", [&](std::ostream& os) {
    os << "env,exp_minus_vertical,horizontal\n";
    for (std::size_t e = 0; e < r.vertical_samples.size(); ++e)
      os << e << ',' << r.vertical_samples[e] << ',' << r.horizontal_samples[e] << '\n';
  });
}

// ---------------------------------------------------------------- free energy

void run_free_energy(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"model.theta", "grid.step", "sizes.n", "sizes.n_env", "tolerance.free_energy",
                            "mean_z.n_env", "mean_z.levels", "mean_z.length", "mean_z.step"}));
  const double step = grid_step(c.cfg);
  const double theta = positive(c.cfg, "model.theta", 1.0);
  const int n = static_cast<int>(count(c.cfg, "sizes.n", 64));
  if (!on_grid(n * theta, step)) throw ConfigError(c.cfg.locate("model.theta") + ": n * theta is off the grid");
  const std::size_t n_env = count(c.cfg, "sizes.n_env", 20);
  const double tol = positive(c.cfg, "tolerance.free_energy", 0.15);
  const TimeGrid grid(0.0, n * theta, step);
  std::vector<double> values(n_env);
  parallel_for(n_env, c.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(c.seed, e), grid, 0, n);
    values[e] = point_to_point_log_Z(env, {0, 0.0}, {n, n * theta}) / n;
  });
  const double p = free_energy_p(theta).value;
  rep.add("free_energy_mean", noted(Metric::within(mean(values), p, tol, Provenance::Target),
                                    "mean of n^-1 log Z against p(theta)"));
  rep.add("free_energy_se", Metric::diagnostic(standard_error(values)));

  // E Z over many small environments
  const std::size_t z_env = count(c.cfg, "mean_z.n_env", 10000);
  const int k = static_cast<int>(count(c.cfg, "mean_z.levels", 3));
  const double zs = positive(c.cfg, "mean_z.step", 0x1.0p-10);
  const double length = aligned(c.cfg, "mean_z.length", zs, 2.0);
  const TimeGrid zgrid(0.0, length, zs);
  std::vector<double> z(z_env);
  parallel_for(z_env, c.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(c.seed, e, 1), zgrid, 0, k);
    z[e] = std::exp(point_to_point_log_Z(env, {0, 0.0}, {k, length}));
  });
  const double target = std::exp(length / 2.0) * std::pow(length, k) / std::tgamma(k + 1.0);
  const double cells = std::llround(length / zs);
  const double lattice = std::exp(length / 2.0) *
                         std::exp(std::lgamma(cells + 1) - std::lgamma(k + 1.0) - std::lgamma(cells - k + 1)) *
                         std::pow(zs, k);
  rep.add("mean_partition_function",
          noted(Metric::within(mean(z), target, 3.0 * standard_error(z), Provenance::Target),
                "e^{(t-s)/2} (t-s)^k / k!, 3 standard errors"));
  rep.add("mean_partition_function_lattice", noted(Metric::diagnostic(lattice), "exact lattice expectation"));
  rep.add("mean_partition_function_se", Metric::diagnostic(standard_error(z)));
  write_file(c, "free_energy.csv", [&](std::ostream& os) {
    os << "env,free_energy\n";
    for (std::size_t e = 0; e < values.size(); ++e) os << e << ',' << values[e] << '\n';
  });
}

void run_restricted_free_energy(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"model.lambda", "restricted.S", "restricted.T", "grid.step", "sizes.n_list",
                            "sizes.n_env", "truncation.kappa", "truncation.threshold", "tolerance.free_energy",
                            "concavity.t", "max_energy.n_env", "max_energy.n", "max_energy.x"}));
  const double step = grid_step(c.cfg);
  const double lambda = positive(c.cfg, "model.lambda", 1.0);
  const double S = positive(c.cfg, "restricted.S", 1.0);
  const double T = c.cfg.get_double("restricted.T", 2.5);
  if (!(T > S)) throw ConfigError(c.cfg.locate("restricted.T") + ": need T > S");
  const auto n_list = level_list(c.cfg, "sizes.n_list", {16, 32, 64}, 1);
  const std::size_t n_env = count(c.cfg, "sizes.n_env", 20);
  const TruncationPolicy policy = policy_from(c.cfg, 6.0);
  const double tol = positive(c.cfg, "tolerance.free_energy", 0.15);
  const int n_max = n_list.back();
  const double reach = std::max(std::isfinite(T) ? n_max * T : 0.0, polymer_cutoff({0, 0.0}, n_max, lambda, policy.kappa));
  const TimeGrid grid(0.0, ceil_to(reach, step), step);
  std::vector<Environment> envs;
  for (std::size_t e = 0; e < n_env; ++e) envs.push_back(Environment::generate(derive_seed(c.seed, e), grid, 0, n_max + 1));
  const auto variant = unrestricted_variant(envs, lambda, S, T, n_list, policy, c.workers);
  const auto& r = variant.without_bar;
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    const std::string tag = "n" + std::to_string(n_list[j]);
    if (j + 1 == n_list.size())
      rep.add("restricted_" + tag, noted(Metric::within(r.mean[j], r.target, tol, Provenance::Target),
                                         "sup over [S,T] of p(t) - lambda t"));
    else
      rep.add("restricted_" + tag, Metric::diagnostic(r.mean[j]));
    rep.add("with_bar_" + tag, Metric::diagnostic(variant.with_bar.mean[j]));
  }
  rep.add("target", Metric::diagnostic(r.target));
  rep.add("boundary_difference_decreasing_fraction", Metric::diagnostic(variant.fraction_decreasing));

  const auto ts = c.cfg.get_doubles("concavity.t", {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0});
  rep.add("concavity_violation", noted(Metric::at_most(concavity_violation(lambda, ts), 1e-12, Provenance::Target),
                                       "chord minus value of p(t) - lambda t"));

  const std::size_t m_env = count(c.cfg, "max_energy.n_env", 100);
  const int mn = static_cast<int>(count(c.cfg, "max_energy.n", 8));
  const double mx = aligned(c.cfg, "max_energy.x", step, 4.0);
  const TimeGrid mgrid(0.0, mx, step);
  std::vector<double> lattice(m_env), continuum(m_env);
  parallel_for(m_env, c.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(c.seed, e, 2), mgrid, 0, mn);
    const auto b = maximal_energy_bound_check(env, mn, mx);
    lattice[e] = b.lattice_slack();
    continuum[e] = b.continuum_slack();
  });
  rep.add("max_energy_lattice_slack", Metric::at_least(*std::min_element(lattice.begin(), lattice.end()), -1e-9,
                                                       Provenance::Target));
  rep.add("max_energy_continuum_slack", Metric::at_least(*std::min_element(continuum.begin(), continuum.end()),
                                                         -1e-9, Provenance::Target));
  write_file(c, "restricted_free_energy.csv", [&](std::ostream& os) {
    os << "n,env,without_bar,with_bar\n";
    for (std::size_t j = 0; j < n_list.size(); ++j)
      for (std::size_t e = 0; e < n_env; ++e)
        os << n_list[j] << ',' << e << ',' << r.values[j][e] << ',' << variant.with_bar.values[j][e] << '\n';
  });
}

void run_shape(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"model.t", "grid.step", "sizes.n", "sizes.n_env", "tolerance.shape"}));
  const double step = grid_step(c.cfg, 0x1.0p-10);
  const double t = positive(c.cfg, "model.t", 1.0);
  const int n = static_cast<int>(count(c.cfg, "sizes.n", 128));
  if (!on_grid(n * t, step)) throw ConfigError(c.cfg.locate("model.t") + ": n * t is off the grid");
  const std::size_t n_env = count(c.cfg, "sizes.n_env", 20);
  const double tol = positive(c.cfg, "tolerance.shape", 0.1);
  std::vector<std::uint64_t> seeds;
  for (std::size_t e = 0; e < n_env; ++e) seeds.push_back(derive_seed(c.seed, e));
  const auto r = shape_check(seeds, TimeGrid(0.0, n * t, step), t, n, c.workers);
  rep.add("shape_mean", noted(Metric::within(r.mean, r.target, tol, Provenance::Target), "2 sqrt(t)"));
  rep.add("shape_se", Metric::diagnostic(r.se));
  rep.add("shape_spread", Metric::diagnostic(r.spread));
  write_file(c, "shape.csv", [&](std::ostream& os) {
    os << "env,L_over_n\n";
    for (std::size_t e = 0; e < r.values.size(); ++e) os << e << ',' << r.values[e] << '\n';
  });
}

void run_zero_temp(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"grid.step", "sizes.n_env", "zero_temp.betas", "zero_temp.n", "zero_temp.t",
                            "zero_temp.fraction"}));
  const double step = grid_step(c.cfg);
  const std::size_t n_env = count(c.cfg, "sizes.n_env", 50);
  const auto betas = c.cfg.get_doubles("zero_temp.betas", {4.0, 16.0, 64.0});
  if (betas.size() < 2 || !std::is_sorted(betas.begin(), betas.end()) || betas.front() <= 0.0)
    throw ConfigError(c.cfg.locate("zero_temp.betas") + ": need at least two increasing positive values");
  const int n = static_cast<int>(count(c.cfg, "zero_temp.n", 8));
  const double t = aligned(c.cfg, "zero_temp.t", step, 8.0);
  const double need = c.cfg.get_double("zero_temp.fraction", 0.9);
  const TimeGrid grid(0.0, t, step);
  const double cells = std::llround(t / step);
  const double log_paths = std::lgamma(cells + 1) - std::lgamma(n + 1.0) - std::lgamma(cells - n + 1);
  std::vector<std::vector<double>> gaps(n_env);
  parallel_for(n_env, c.workers, [&](std::size_t e) {
    const Environment env = Environment::generate(derive_seed(c.seed, e), grid, 0, n);
    gaps[e] = zero_temperature_check(env, {0, 0.0}, {n, t}, betas);
  });
  std::vector<char> dec(n_env);
  double lowest = kUnbounded, excess = -kUnbounded;
  for (std::size_t e = 0; e < n_env; ++e) {
    dec[e] = gaps[e].back() < gaps[e].front();
    for (std::size_t b = 0; b < betas.size(); ++b) {
      lowest = std::min(lowest, gaps[e][b]);
      excess = std::max(excess, gaps[e][b] - log_paths / betas[b]);
    }
  }
  rep.add("gap_decrease_fraction", noted(Metric::at_least(fraction(dec), need, Provenance::Target),
                                         "gap(last beta) < gap(first beta)"));
  rep.add("gap_min", noted(Metric::at_least(lowest, -1e-9, Provenance::Oracle), "lattice lower bound 0"));
  rep.add("gap_excess_over_entropy", noted(Metric::at_most(excess, 1e-9, Provenance::Oracle),
                                           "gap - log C(K, n) / beta, lattice upper bound 0"));
  for (std::size_t b = 0; b < betas.size(); ++b) {
    std::vector<double> col;
    for (const auto& g : gaps) col.push_back(g[b]);
    std::ostringstream key;
    key << "gap_mean_beta" << betas[b];
    rep.add(key.str(), Metric::diagnostic(mean(col)));
  }
  write_file(c, "zero_temp.csv", [&](std::ostream& os) {
    os << "env";
    for (double b : betas) os << ",gap_beta" << b;
    os << '\n';
    for (std::size_t e = 0; e < n_env; ++e) {
      os << e;
      for (double g : gaps[e]) os << ',' << g;
      os << '\n';
    }
  });
}

// ---------------------------------------------------------------- paths

void run_sample_paths(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"grid.step", "paths.to_level", "paths.to_time", "sizes.n_paths", "paths.check_jump",
                            "paths.p_min"}));
  const double step = grid_step(c.cfg);
  const int n = static_cast<int>(count(c.cfg, "paths.to_level", 4));
  const double t = aligned(c.cfg, "paths.to_time", step, 4.0);
  const std::size_t n_paths = count(c.cfg, "sizes.n_paths", 2000);
  const int k = static_cast<int>(c.cfg.get_int("paths.check_jump", 0));
  if (k < 0 || k >= n) throw ConfigError(c.cfg.locate("paths.check_jump") + ": must lie in [0, to_level)");
  const double p_min = c.cfg.get_double("paths.p_min", 1e-3);
  const TimeGrid grid(0.0, t, step);
  const Environment env = Environment::generate(derive_seed(c.seed, 0), grid, 0, n);
  const PathSampler sampler(env, {0, 0.0}, {n, t});
  std::vector<PolymerPath> paths(n_paths);
  parallel_for(n_paths, c.workers, [&](std::size_t i) {
    const std::uint64_t stream = derive_seed(c.seed, 0, i + 1);
    Rng rng(stream);
    paths[i] = sampler.sample(rng);
    paths[i].stream = stream;
  });
  // tau_k histogram in bins of 1/8 of the span against the exact marginal
  const auto marginal = sampler.marginal_density(k);
  const std::size_t bins = 16;
  std::vector<double> observed(bins, 0.0), expected(bins, 0.0);
  auto bin_of = [&](std::size_t idx) { return std::min(bins - 1, idx * bins / (grid.n_points - 1)); };
  for (std::size_t x = 0; x < marginal.size(); ++x) expected[bin_of(x)] += marginal[x] * n_paths;
  for (const auto& p : paths) observed[bin_of(grid.index(p.jumps[k]))] += 1.0;
  const auto chi = chi_square(observed, expected);
  rep.add("marginal_chi_square_p", noted(Metric::at_least(chi.p_value, p_min, Provenance::Oracle),
                                         "empirical tau_k against the exact lattice marginal"));
  rep.add("log_Z", Metric::diagnostic(sampler.log_Z()));
  write_file(c, "paths.csv", [&](std::ostream& os) { write_paths_csv(os, paths); });
}

void run_tightness(const Ctx& c, Report& rep) {
  c.cfg.require_known(keys({"grid.step", "sizes.n_list", "sizes.n_paths", "tightness.theta", "tightness.horizon",
                            "tightness.deltas", "tightness.paths_per_env"}));
  const double step = grid_step(c.cfg);
  const auto n_list = level_list(c.cfg, "sizes.n_list", {8, 16, 32}, 2);
  const std::size_t n_paths = count(c.cfg, "sizes.n_paths", 500);
  const std::size_t per_env = count(c.cfg, "tightness.paths_per_env", 10);
  if (n_paths % per_env != 0) throw ConfigError(c.cfg.locate("tightness.paths_per_env") + ": must divide n_paths");
  const double theta = snap_theta(positive(c.cfg, "tightness.theta", 1.0), step);
  const double horizon = positive(c.cfg, "tightness.horizon", 4.0);
  auto deltas = c.cfg.get_doubles("tightness.deltas", {1.0, 0.5, 0.25, 0.125, 0.0625});
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  std::vector<std::vector<double>> prob;
  nlohmann::json table = nlohmann::json::array();
  for (int n : n_list) {
    const double t = n * theta;
    const TimeGrid grid(0.0, t, step);
    const std::size_t n_envs = n_paths / per_env;
    std::vector<PolymerPath> paths(n_paths);
    parallel_for(n_envs, c.workers, [&](std::size_t e) {
      const Environment env = Environment::generate(derive_seed(c.seed, e, static_cast<std::uint64_t>(n)), grid, 0, n);
      const PathSampler sampler(env, {0, 0.0}, {n, t});
      for (std::size_t j = 0; j < per_env; ++j) {
        const std::uint64_t stream = derive_seed(c.seed, e, 1000 + j);
        Rng rng(stream);
        paths[e * per_env + j] = sampler.sample(rng);
        paths[e * per_env + j].stream = stream;
      }
    });
    prob.push_back(min_gap_probabilities(paths, horizon, deltas));
    for (std::size_t d = 0; d < deltas.size(); ++d)
      table.push_back({{"n", n}, {"delta", deltas[d]}, {"probability", prob.back()[d]}});
  }
  // non-increasing as delta shrinks, for every n
  bool monotone = true;
  for (const auto& p : prob)
    for (std::size_t d = 1; d < p.size(); ++d) monotone = monotone && p[d] <= p[d - 1];
  // no growth in n beyond sampling noise: spread over n within 4 pooled binomial errors
  double worst = -kUnbounded;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    double lo = 1.0, hi = 0.0, pooled = 0.0;
    for (const auto& p : prob) {
      lo = std::min(lo, p[d]);
      hi = std::max(hi, p[d]);
      pooled += p[d] / prob.size();
    }
    const double band = 4.0 * std::sqrt(2.0 * pooled * (1.0 - pooled) / n_paths) + 1.0 / n_paths;
    worst = std::max(worst, (hi - lo) - band);
  }
  double sup_small = 0.0;
  for (const auto& p : prob) sup_small = std::max(sup_small, p.back());
  rep.add("monotone_in_delta", Metric::at_least(monotone ? 1.0 : 0.0, 1.0, Provenance::Target));
  rep.add("uniform_in_n", noted(Metric::at_most(worst, 0.0, Provenance::Target),
                                "max over delta of spread over n minus 4 pooled binomial errors"));
  rep.add("sup_probability_smallest_delta", Metric::diagnostic(sup_small));
  rep.add_table("min_gap", table);
  write_file(c, "tightness.csv", [&](std::ostream& os) {
    os << "n,delta,probability\n";
    for (const auto& r : table)
      os << r["n"].get<int>() << ',' << r["delta"].get<double>() << ',' << r["probability"].get<double>() << '\n';
  });
}

using Runner = void (*)(const Ctx&, Report&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"burke", run_burke},
      {"lpp-burke", run_lpp_burke},
      {"stationary-ratio", run_stationary_ratio},
      {"comparison", run_comparison},
      {"busemann", run_busemann},
      {"busemann-dist", run_busemann_dist},
      {"free-energy", run_free_energy},
      {"restricted-free-energy", run_restricted_free_energy},
      {"shape", run_shape},
      {"zero-temp", run_zero_temp},
      {"sample-paths", run_sample_paths},
      {"tightness", run_tightness},
      {"refine", run_refine},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, r] : runners()) v.push_back(k);
    return v;
  }();
  return names;
}

Report run_experiment(const std::string& name, const Config& cfg, const RunOptions& opts) {
  const auto it = runners().find(name);
  if (it == runners().end()) throw ConfigError("unknown experiment '" + name + "'");
  if (cfg.has("experiment") && cfg.get_string("experiment") != name)
    throw ConfigError(cfg.locate("experiment") + ": config is for '" + cfg.get_string("experiment") + "', not '" +
                      name + "'");
  const std::uint64_t seed = opts.seed ? *opts.seed : cfg.get_u64("seed", 1);
  int workers = opts.workers;
  if (workers <= 0) workers = static_cast<int>(cfg.get_int("workers", 0));
  Report rep(name, seed, cfg.echo());
  const auto start = std::chrono::steady_clock::now();
  it->second(Ctx{cfg, seed, workers, opts.out_dir}, rep);
  rep.set_wall_clock(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  if (!opts.out_dir.empty()) rep.write(opts.out_dir);
  return rep;
}

}  // namespace oy
