// Acceptance suite: one PASS/FAIL line per criterion; exit status is the number of
// failures. Tolerances are fixed below and are not tuned per run.

#include "dsp/asymptotic.hpp"
#include "dsp/exact.hpp"
#include "dsp/pricing.hpp"
#include "dsp/rng.hpp"
#include "dsp/routing.hpp"
#include "dsp/scenarios.hpp"
#include "dsp/simulator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace dsp;

namespace {

// Criterion 1
constexpr int kOracleReps = 100000;
constexpr double kOracleZ = 3.0;
constexpr double kOracleCellShare = 0.95;
constexpr double kOracleSeconds = 120.0;
// Criterion 2
constexpr double kOdeStep = 1e-4;
constexpr double kOdeTol = 1e-5;
constexpr int kOdeMaxN = 25;
// Criterion 3
constexpr double kInfiniteLambdaT = 40.0;
constexpr double kPageTol = 1e-3;
constexpr double kPinskyTol = 1e-4;
// Criterion 4
constexpr double kGapRatio = 4.0;
// Criterion 5
constexpr int kMonotoneMaxN = 500;
constexpr double kMonotoneTol = -1e-9;
// Criterion 6
constexpr double kCostTol = 0.50;
// Criterion 7
constexpr double kTspReference = 207.81;
constexpr double kCvrpReference = 222.83;
constexpr double kRouteSlack = 1.10;
constexpr double kRouteSeconds = 180.0;
// Criterion 8
constexpr int kCaseSeeds = 5;
constexpr double kImprovementLo = 27.0;
constexpr double kImprovementHi = 38.0;
constexpr double kCaseSeconds = 600.0;
// Criterion 9
constexpr int kDensityPoints = 1000;
constexpr int kDensitySeeds = 50;
constexpr double kDensityUniform = 0.146;
constexpr double kDensityClusters = 0.125;
constexpr double kDensityRel = 0.15;
// Criterion 10
constexpr double kStabilityBand = 6.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct NamedPmf {
  const char* name;
  BundlePmf pmf;
};

std::vector<NamedPmf> test_pmfs() {
  return {{"det:2", BundlePmf::deterministic(2)},
          {"det:3", BundlePmf::deterministic(3)},
          {"uniform:1..3", BundlePmf::uniform(1, 3)},
          {"tpois:10,20", BundlePmf::truncated_poisson(10.0, 20)}};
}

Outcome exact_vs_simulation() {
  const auto start = Clock::now();
  int cells = 0;
  int within = 0;
  std::ostringstream misses;
  for (const auto& [name, pmf] : test_pmfs()) {
    const auto tab = build_gamma(pmf, 50);
    for (int n : {5, 10, 50}) {
      for (double lambda : {0.3, 1.0}) {
        for (double t : {0.5, 2.0}) {
          const double exact = expected_pickups_circle({t, n, lambda}, tab);
          const auto mc = mc_expected_pickups(n, lambda, pmf, t, kOracleReps, derive_seed(2024, cells));
          const double diff = std::abs(mc.mean - exact);
          const bool ok = diff <= kOracleZ * mc.std_error;
          within += ok;
          if (!ok) misses << " [" << name << " n=" << n << " lambda=" << lambda << " t=" << t << " z=" << fmt("%.2f", diff / mc.std_error) << "]";
          ++cells;
        }
      }
    }
  }
  const double secs = seconds_since(start);
  const bool pass = within >= kOracleCellShare * cells && secs <= kOracleSeconds;
  return {pass, std::to_string(within) + "/" + std::to_string(cells) + " cells within 3 SE, " +
                    fmt("%.1f s", secs) + misses.str()};
}

Outcome ode_consistency() {
  double worst = 0.0;
  for (const auto& [name, pmf] : test_pmfs()) {
    const auto tab = build_gamma(pmf, kOdeMaxN);
    for (int n = 1; n <= kOdeMaxN; ++n) {
      for (double lambda : {0.3, 1.0}) {
        for (double t : {0.5, 2.0, 8.0}) worst = std::max(worst, ode_residual({t, n, lambda}, tab, kOdeStep));
      }
    }
  }
  return {worst <= kOdeTol, "max residual " + fmt("%.3g", worst)};
}

Outcome limit_constants() {
  const auto det2 = build_gamma(BundlePmf::deterministic(2), 1);
  const double a2 = alpha({kInfiniteLambdaT, 1.0}, det2).alpha;
  const double page = std::abs(a2 - (1.0 - std::exp(-2.0)));
  bool pass = page <= kPageTol;
  std::string detail = "|alpha(det:2) - (1-e^-2)| = " + fmt("%.2e", page);
  for (int m : {2, 3, 5}) {
    const auto tab = build_gamma(BundlePmf::deterministic(m), m - 1);
    const double gap = std::abs(alpha({kInfiniteLambdaT, 1.0}, tab).alpha - alpha_pinsky(m).alpha);
    pass = pass && gap <= kPinskyTol;
    detail += "; m=" + std::to_string(m) + " closed-form gap " + fmt("%.2e", gap);
  }
  return {pass, detail};
}

Outcome convergence_rate() {
  const auto tab = build_gamma(BundlePmf::deterministic(2), 400);
  const double a = alpha({1.0, 1.0}, tab).alpha;
  double lo = INFINITY;
  double hi = 0.0;
  std::string detail = "circle gaps";
  std::string line = "; line gaps";
  for (int n : {50, 100, 200, 400}) {
    const double gap = convergence_gap(1.0, 1.0, n, tab);
    lo = std::min(lo, gap);
    hi = std::max(hi, gap);
    detail += " " + fmt("%.3g", gap);
    line += " " + fmt("%.4f", std::abs(expected_pickups_line({1.0, n, 1.0}, tab) - n * a));
  }
  const double ratio = hi / lo;
  return {ratio <= kGapRatio, detail + " (max/min " + fmt("%.3g", ratio) + ")" + line};
}

Outcome monotonicity() {
  double worst = INFINITY;
  for (const auto& [name, pmf] : test_pmfs()) {
    const int m = pmf.m();
    const double shift = (m + 1.0) / (m - pmf.mean() + 1.0);
    const auto tab = build_gamma(pmf, kMonotoneMaxN);
    for (double t : {0.5, 2.0, 8.0}) {
      double prev = expected_pickups_line({t, m, 1.0}, tab) + m * shift;
      for (int n = m + 1; n <= kMonotoneMaxN; ++n) {
        const double v = expected_pickups_line({t, n, 1.0}, tab) + n * shift;
        worst = std::min(worst, v - prev);
        prev = v;
      }
    }
  }
  return {worst >= kMonotoneTol, "smallest increment " + fmt("%.3g", worst)};
}

Outcome cost_arithmetic() {
  const auto p = default_params().params;
  const double uniform = van_only_cost(222.83, 2000, p);
  const double clusters = van_only_cost(193.23, 2000, p);
  const bool pass = std::abs(uniform - 2798.81) <= kCostTol && std::abs(clusters - 2730.46) <= kCostTol;
  return {pass, fmt("%.2f", uniform) + " vs 2798.81, " + fmt("%.2f", clusters) + " vs 2730.46"};
}

Outcome routing_scale() {
  const auto start = Clock::now();
  const Point depot(2.5, 2.5);
  const auto pts = gen_uniform_square(2000, 5.0, derive_seed(1, 0));
  const auto tour = tsp_tour(pts, Metric::L1);
  const auto sol = cvrp_solve(pts, depot, 200, Metric::L1, &tour);
  const auto b = cvrp_bounds(pts, depot, 200, tour.length, Metric::L1);
  const double secs = seconds_since(start);
  const bool pass = tour.length <= kRouteSlack * kTspReference && sol.total_length <= kRouteSlack * kCvrpReference &&
                    sol.total_length >= b.lower && secs <= kRouteSeconds;
  return {pass, "TSP " + fmt("%.2f", tour.length) + " (limit " + fmt("%.2f", kRouteSlack * kTspReference) + "), CVRP " +
                    fmt("%.2f", sol.total_length) + " (limit " + fmt("%.2f", kRouteSlack * kCvrpReference) +
                    ", lower bound " + fmt("%.2f", b.lower) + ", " + sol.method + "), " + fmt("%.1f s", secs)};
}

std::vector<double> uniform_improvements;  // reused by criterion 10 at n = 2000

Outcome case_study() {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;
  struct Case {
    ScenarioKind kind;
    const char* name;
    double z_lo, z_hi;
  };
  for (const auto& c : {Case{ScenarioKind::UniformSquare, "uniform", 1.0, 1.3},
                        Case{ScenarioKind::ThreeClusters, "clusters", 1.1, 1.35}}) {
    Scenario s;
    s.kind = c.kind;
    const auto rep = run_case_study(s, CaseStudyConfig{}, kCaseSeeds);
    bool z_ok = true;
    for (const auto& o : rep.outcomes) z_ok = z_ok && o.z_star >= c.z_lo && o.z_star <= c.z_hi;
    const double imp = rep.improvement_pct.mean;
    pass = pass && z_ok && imp >= kImprovementLo && imp <= kImprovementHi;
    if (c.kind == ScenarioKind::UniformSquare) {
      for (const auto& o : rep.outcomes) uniform_improvements.push_back(o.improvement_pct);
    }
    detail += std::string(detail.empty() ? "" : "; ") + c.name + " improvement " + fmt("%.2f", imp) + "% (sd " +
              fmt("%.2f", rep.improvement_pct.sd) + "), z* " + fmt("%.3f", rep.z_star.mean) + " [" +
              fmt("%.3f", rep.z_star.mean - rep.z_star.sd) + ".." + fmt("%.3f", rep.z_star.mean + rep.z_star.sd) +
              "], leftovers " + fmt("%.0f", rep.leftover_count.mean);
  }
  const double secs = seconds_since(start);
  pass = pass && secs <= kCaseSeconds;
  return {pass, detail + ", " + fmt("%.1f s", secs)};
}

Outcome neighbor_distance() {
  bool pass = true;
  std::string detail;
  for (auto [kind, target, name] : {std::tuple{ScenarioKind::UniformSquare, kDensityUniform, "uniform"},
                                    std::tuple{ScenarioKind::ThreeClusters, kDensityClusters, "clusters"}}) {
    Scenario s;
    s.kind = kind;
    s.n = kDensityPoints;
    double mean = 0.0;
    double sd = 0.0;
    for (int k = 0; k < kDensitySeeds; ++k) {
      const auto pts = generate(s, derive_seed(77, k));
      const auto nd = neighbor_density(tsp_tour(pts, Metric::L1), pts, Metric::L1, 50, 1.0);
      mean += nd.mean / kDensitySeeds;
      sd += nd.sd / kDensitySeeds;
    }
    pass = pass && std::abs(mean - target) <= kDensityRel * target;
    detail += std::string(detail.empty() ? "" : "; ") + name + " mean " + fmt("%.4f", mean) + " vs " +
              fmt("%.3f", target) + " (sd " + fmt("%.3f", sd) + ")";
  }
  return {pass, detail};
}

Outcome improvement_stability() {
  double lo = INFINITY;
  double hi = -INFINITY;
  std::string detail;
  for (int n : {600, 1000, 1500, 2000}) {
    double mean = 0.0;
    if (n == 2000 && !uniform_improvements.empty()) {
      for (double v : uniform_improvements) mean += v / uniform_improvements.size();
    } else {
      Scenario s;
      s.n = n;
      mean = run_case_study(s, CaseStudyConfig{}, kCaseSeeds).improvement_pct.mean;
    }
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
    detail += (detail.empty() ? "n=" : ", n=") + std::to_string(n) + ": " + fmt("%.2f", mean) + "%";
  }
  return {hi - lo <= kStabilityBand, detail + " (band " + fmt("%.2f", hi - lo) + " points)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 exact vs simulation oracle", exact_vs_simulation},
      {"2 ODE consistency", ode_consistency},
      {"3 limit constants", limit_constants},
      {"4 convergence rate", convergence_rate},
      {"5 monotone shifted pickups", monotonicity},
      {"6 cost arithmetic", cost_arithmetic},
      {"7 routing scale", routing_scale},
      {"8 case-study improvement", case_study},
      {"9 neighbour-distance density", neighbor_distance},
      {"10 improvement stability", improvement_stability},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures;
}
