// Acceptance gate: one line per criterion, exit status 1 if any fails.
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "oy/busemann.hpp"
#include "oy/experiments.hpp"
#include "oy/lpp.hpp"
#include "oy/paths.hpp"
#include "oy/stationary.hpp"

using namespace oy;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

Report run(const std::string& name, const std::function<void(Config&)>& tweak = {}) {
  Config cfg = Config::load(std::string(OY_CONFIG_DIR) + "/" + name + ".cfg");
  if (tweak) tweak(cfg);
  return run_experiment(name, cfg);
}

// gated metrics whose names satisfy `pick`; detail lists every one of them
Outcome gate(const Report& r, const std::function<bool(const std::string&)>& pick) {
  Outcome o;
  for (const auto& [name, m] : r.metrics()) {
    if (!m.gated() || !pick(name)) continue;
    o.passed = o.passed && m.passed();
    if (!m.passed()) o.detail += " FAIL:" + name + "=" + fmt(m.value) + "(target " + fmt(*m.target) + ")";
  }
  return o;
}

void merge(Outcome& into, const Outcome& other) {
  into.passed = into.passed && other.passed;
  into.detail += other.detail;
}

bool has(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

Outcome exact_identities() {
  const double step = 0x1.0p-8;
  const double H = default_horizon(1.0);
  const TimeGrid g(-std::ceil(H), 40.0, step);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto env = Environment::generate(derive_seed(2024, seed), g, 0, 4);
    const auto f = build_stationary_fields(env, 1.0, 4, H);
    const auto ex = check_exact_identities(env, f);
    const auto lf = build_lpp_stationary_fields(env, 1.0, 4, H);
    const auto lx = check_lpp_exact_identities(env, lf);
    worst = std::max({worst, ex.g_recursion, ex.check_definition, ex.telescoping, lx.f_recursion,
                      lx.tilde_definition});
    const auto w = env.window(0.0, 40.0);
    const TimeGrid& pos = w.grid();
    const std::vector<int> ns = {2, 3, 4};
    for (int model = 0; model < 2; ++model) {
      auto slices = [&](Point p) { return model == 0 ? forward_slices(w, p, 4) : lpp_slices(w, p, 4); };
      const auto sx = slices({0, 0.0}), sy = slices({1, 0.0}), sz = slices({0, 1.0});
      const auto xy = sequence_from_slices(sx, sy, pos, 1.0, ns, EndpointRule::Linear);
      const auto yz = sequence_from_slices(sy, sz, pos, 1.0, ns, EndpointRule::Linear);
      const auto xz = sequence_from_slices(sx, sz, pos, 1.0, ns, EndpointRule::Linear);
      for (double r : check_cocycle(xy, yz, xz)) worst = std::max(worst, r);
    }
  }
  return {worst <= 1e-10, " max residual " + fmt(worst)};
}

Outcome oracle_equivalence() {
  const TimeGrid small(0.0, 15.0 / 16, 1.0 / 16);
  int lpp_mismatch = 0;
  for (std::uint64_t e = 0; e < 50; ++e) {
    const auto env = Environment::generate(derive_seed(77, e), small, 0, 3);
    for (int m = 0; m <= 3; ++m)
      for (int n = m; n <= 3; ++n)
        if (last_passage(env, {m, 0.0}, {n, small.end()}) != oracle::brute_L(env, {m, 0.0}, {n, small.end()}))
          ++lpp_mismatch;
  }
  const TimeGrid mid(0.0, 63.0 / 64, 1.0 / 64);
  double worst = 0.0;
  for (std::uint64_t e = 0; e < 5; ++e) {
    const auto env = Environment::generate(derive_seed(78, e), mid, 0, 3);
    const PathSampler ps(env, {0, 0.0}, {3, mid.end()});
    for (int k = 0; k < 3; ++k) {
      const auto fast = ps.marginal_density(k);
      const auto ref = oracle::brute_marginal(env, {0, 0.0}, {3, mid.end()}, k);
      for (std::size_t x = 0; x < ref.size(); ++x)
        if (ref[x] > 0.0) worst = std::max(worst, std::abs(fast[x] / ref[x] - 1.0));
    }
  }
  return {lpp_mismatch == 0 && worst <= 1e-9,
          " lpp mismatches " + std::to_string(lpp_mismatch) + ", marginal rel err " + fmt(worst)};
}

}  // namespace

int main() {
  int failed = 0;
  auto line = [&](int id, const std::string& title, const std::function<Outcome()>& body) {
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string(" error: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("[%s] %2d. %s:%s\n", o.passed ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
    std::fflush(stdout);
  };

  line(1, "exact identities <= 1e-10", exact_identities);

  line(2, "comparison sandwiches, slack >= -1e-9", [] {
    const auto r = run("comparison");
    auto o = gate(r, [](const std::string&) { return true; });
    o.detail += " polymer min " + fmt(r.metric("polymer_min_gap").value) + ", lpp min " +
                fmt(r.metric("lpp_min_gap").value);
    return o;
  });

  line(3, "Burke laws (Gamma, Exp, mean)", [] {
    const auto poly = run("burke");
    auto o = gate(poly, [](const std::string& n) { return n == "gamma_ks" || n == "gamma_mean"; });
    const auto lpp = run("lpp-burke");
    merge(o, gate(lpp, [](const std::string& n) { return n == "exp_ks"; }));
    o.detail += " gamma KS " + fmt(poly.metric("gamma_ks").value) + ", exp KS " + fmt(lpp.metric("exp_ks").value) +
                " (crit " + fmt(lpp.metric("exp_ks").target.value()) + ")";
    // same test on a finer grid, reported only
    const auto fine = run("lpp-burke", [](Config& c) { c.set("grid.step", "2^-10"); });
    o.detail += "; note: exp KS at step 2^-10 = " + fmt(fine.metric("exp_ks").value);
    return o;
  });

  // one refinement run serves criteria 4 and 5
  std::optional<Report> refine;
  auto refined = [&]() -> const Report& {
    if (!refine) refine = run("refine");
    return *refine;
  };
  line(4, "stationary ratio identity, tol(step) and rate", [&] {
    const auto& r = refined();
    auto o = gate(r, [](const std::string& n) { return has(n, "ratio_") || n == "tolerance_at_finest"; });
    o.detail += " slopes h/v/spread " + fmt(r.metric("ratio_horizontal_slope").value) + "/" +
                fmt(r.metric("ratio_vertical_slope").value) + "/" + fmt(r.metric("ratio_spread_slope").value);
    return o;
  });
  line(5, "involution identity, tol(step) and rate", [&] {
    const auto& r = refined();
    auto o = gate(r, [](const std::string& n) { return has(n, "involution"); });
    o.detail += " slope " + fmt(r.metric("involution_slope").value);
    return o;
  });

  line(6, "small-instance oracle equivalence", oracle_equivalence);

  std::optional<Report> fe;
  auto free_energy = [&]() -> const Report& {
    if (!fe) fe = run("free-energy");
    return *fe;
  };
  line(7, "mean partition function", [&] {
    const auto& r = free_energy();
    auto o = gate(r, [](const std::string& n) { return n == "mean_partition_function"; });
    o.detail += " mean " + fmt(r.metric("mean_partition_function").value) + " vs " +
                fmt(r.metric("mean_partition_function").target.value());
    return o;
  });
  line(8, "free energy and LPP shape", [&] {
    const auto& r = free_energy();
    auto o = gate(r, [](const std::string& n) { return n == "free_energy_mean"; });
    const auto s = run("shape");
    merge(o, gate(s, [](const std::string&) { return true; }));
    o.detail += " p " + fmt(r.metric("free_energy_mean").value) + " vs " +
                fmt(r.metric("free_energy_mean").target.value()) + ", L/n " + fmt(s.metric("shape_mean").value) +
                " vs 2";
    return o;
  });

  line(9, "Busemann convergence diagnostics", [] {
    const auto r = run("busemann");
    auto o = gate(r, [](const std::string& n) { return has(n, "decrease") || has(n, "agreement"); });
    o.detail += " decrease poly v/h " + fmt(r.metric("polymer_vertical_decrease_fraction").value) + "/" +
                fmt(r.metric("polymer_horizontal_decrease_fraction").value) + ", lpp v/h " +
                fmt(r.metric("lpp_vertical_decrease_fraction").value) + "/" +
                fmt(r.metric("lpp_horizontal_decrease_fraction").value);
    return o;
  });

  line(10, "limiting distribution", [] {
    const auto r = run("busemann-dist");
    auto o = gate(r, [](const std::string&) { return true; });
    o.detail += " vertical KS " + fmt(r.metric("vertical_ks").value) + ", horizontal mean " +
                fmt(r.metric("horizontal_mean").value) + " vs " + fmt(r.metric("horizontal_mean").target.value());
    return o;
  });

  line(11, "zero-temperature limit", [] {
    const auto r = run("zero-temp");
    auto o = gate(r, [](const std::string&) { return true; });
    o.detail += " decreasing fraction " + fmt(r.metric("gap_decrease_fraction").value);
    return o;
  });

  line(12, "tightness statistics", [] {
    const auto r = run("tightness");
    auto o = gate(r, [](const std::string&) { return true; });
    o.detail += " spread excess " + fmt(r.metric("uniform_in_n").value);
    return o;
  });

  std::printf("%d of 12 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
