#pragma once

#include "dsp/bundle.hpp"
#include "dsp/pricing.hpp"
#include "dsp/routing.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dsp {

enum class ScenarioKind { UniformSquare, ThreeClusters, CustomCsv };

ScenarioKind parse_scenario_kind(const std::string& name);
std::string to_string(ScenarioKind kind);

enum class DepotPlacement { Center, Corner };

struct Scenario {
  ScenarioKind kind = ScenarioKind::UniformSquare;
  int n = 2000;          // ignored by CustomCsv
  double side = 5.0;     // miles
  std::uint64_t seed = 1;
  DepotPlacement depot = DepotPlacement::Center;
  std::string csv_path;  // CustomCsv only

  void validate() const;
  Point depot_point() const;
};

// i.i.d. uniform on [0, side]^2.
Points gen_uniform_square(int n, double side, std::uint64_t seed);

struct Ellipse {
  Point center;
  Point semi_axes;

  bool contains(const Point& p) const;
};

// Background points uniform on the 5x5 square followed by the points of each ellipse
// of three_cluster_ellipses(), in that order. Component sizes are n scaled from
// 500/700/500/300; the last component absorbs rounding.
Points gen_three_clusters(std::uint64_t seed, int n = 2000);
std::vector<int> three_cluster_counts(int n);
std::vector<Ellipse> three_cluster_ellipses();

// Points for one realization of the scenario; CustomCsv ignores the seed.
Points generate(const Scenario& scenario, std::uint64_t seed);

struct Defaults {
  CostParams params;
  IncentiveModel model;
  BundlePmf pmf = BundlePmf::deterministic(1);
};

// Calibrated constants of the case study (5x5 mile region, V = 200, T = 8 h,
// lambda(z) = 0.03 + 0.04 z, bundle sizes truncated Poisson(10) on 1..20).
Defaults default_params();

struct CaseStudyConfig {
  Defaults defaults = default_params();
  Metric metric = Metric::L1;
  int gamma_cap = kDefaultGammaCap;
  int grid_points = 64;
  int threads = 1;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  int n = 0;
  double r_bar = 0.0;
  double z_star = 0.0;
  double lambda_star = 0.0;
  double cost_expected = 0.0;  // model objective at z_star
  double expected_pickups = 0.0;
  bool pickups_exact = true;   // false when n * alpha replaced the exact table
  double payments = 0.0;       // prices actually paid for picked packages
  double cost_leftover_vans = 0.0;
  double cost_mixed = 0.0;
  double cost_van_only = 0.0;
  double improvement_pct = 0.0;
  int leftover_count = 0;
  double tsp_len = 0.0;
  double cvrp_all_len = 0.0;
  double cvrp_leftover_len = 0.0;
  std::vector<std::pair<double, double>> objective_grid;
  Points leftover_points;
  CvrpSolution leftover_routes;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for one seed
};

struct CaseStudyReport {
  Scenario scenario;
  std::vector<SeedOutcome> outcomes;  // by seed index
  MeanSd z_star;
  MeanSd cost_mixed;
  MeanSd cost_van_only;
  MeanSd improvement_pct;
  MeanSd leftover_count;
  MeanSd tsp_len;
  MeanSd cvrp_all_len;
  MeanSd cvrp_leftover_len;
};

// improvement_pct = 100 (van_only - mixed) / van_only, per seed.
double improvement_pct(double cost_mixed, double cost_van_only);

// Seed index s uses generator seed derive_seed(scenario.seed, 2s) and simulation seed
// derive_seed(scenario.seed, 2s + 1).
SeedOutcome run_case_seed(const Scenario& scenario, const CaseStudyConfig& config, int seed_index);

CaseStudyReport run_case_study(const Scenario& scenario, const CaseStudyConfig& config,
                               int n_seeds);

}  // namespace dsp
