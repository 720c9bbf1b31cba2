#include "dsp/scenarios.hpp"

#include "dsp/error.hpp"
#include "dsp/rng.hpp"
#include "dsp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace dsp {

ScenarioKind parse_scenario_kind(const std::string& name) {
  if (name == "uniform" || name == "uniform_square") return ScenarioKind::UniformSquare;
  if (name == "clusters" || name == "three_clusters") return ScenarioKind::ThreeClusters;
  if (name == "csv" || name == "custom_csv") return ScenarioKind::CustomCsv;
  throw ConfigError("unknown scenario '" + name + "' (expected uniform, clusters or csv)");
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::UniformSquare: return "uniform";
    case ScenarioKind::ThreeClusters: return "clusters";
    case ScenarioKind::CustomCsv: return "csv";
  }
  return "uniform";
}

void Scenario::validate() const {
  if (kind != ScenarioKind::CustomCsv && n < 1) throw InvalidArgument("scenario needs n >= 1");
  if (!(side > 0.0)) throw InvalidArgument("scenario needs side > 0");
  if (kind == ScenarioKind::CustomCsv && csv_path.empty()) {
    throw InvalidArgument("csv scenario needs a points file");
  }
}

Point Scenario::depot_point() const {
  return depot == DepotPlacement::Center ? Point(side / 2.0, side / 2.0) : Point(0.0, 0.0);
}

Points gen_uniform_square(int n, double side, std::uint64_t seed) {
  if (n < 0) throw InvalidArgument("point count must be nonnegative");
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  Points pts(2, n);
  for (int j = 0; j < n; ++j) {
    pts(0, j) = u(rng);
    pts(1, j) = u(rng);
  }
  return pts;
}

bool Ellipse::contains(const Point& p) const {
  return ((p - center).array() / semi_axes.array()).square().sum() <= 1.0;
}

std::vector<Ellipse> three_cluster_ellipses() {
  return {{Point(1.5, 4.0), Point(1.2, 1.0)},
          {Point(3.8, 3.3), Point(0.8, 1.2)},
          {Point(2.5, 1.4), Point(1.2, 1.0)}};
}

std::vector<int> three_cluster_counts(int n) {
  if (n < 0) throw InvalidArgument("point count must be nonnegative");
  const double shares[] = {0.25, 0.35, 0.25};
  std::vector<int> counts;
  int used = 0;
  for (double s : shares) {
    counts.push_back(static_cast<int>(std::lround(s * n)));
    used += counts.back();
  }
  counts.push_back(std::max(0, n - used));
  return counts;
}

Points gen_three_clusters(std::uint64_t seed, int n) {
  const auto counts = three_cluster_counts(n);
  const auto ellipses = three_cluster_ellipses();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Points pts(2, n);
  int col = 0;
  for (int j = 0; j < counts[0]; ++j, ++col) {
    pts(0, col) = 5.0 * unit(rng);
    pts(1, col) = 5.0 * unit(rng);
  }
  for (std::size_t e = 0; e < ellipses.size(); ++e) {
    const auto& el = ellipses[e];
    for (int j = 0; j < counts[e + 1]; ++j, ++col) {
      Point p;
      do {
        p = el.center + el.semi_axes.cwiseProduct(Point(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0));
      } while (!el.contains(p));
      pts.col(col) = p;
    }
  }
  return pts;
}

Points generate(const Scenario& scenario, std::uint64_t seed) {
  scenario.validate();
  switch (scenario.kind) {
    case ScenarioKind::UniformSquare: return gen_uniform_square(scenario.n, scenario.side, seed);
    case ScenarioKind::ThreeClusters: return gen_three_clusters(seed, scenario.n);
    case ScenarioKind::CustomCsv: return read_points_csv(scenario.csv_path);
  }
  return {};
}

Defaults default_params() {
  Defaults d;
  auto& p = d.params;
  p.zeta_v = 0.550;
  p.h_v = 42.389;
  p.v_v = 24.1;
  p.capacity = 200;
  p.tau_v = 97.0 / 3600.0;
  p.zeta_p = 0.1284;
  p.v_p = 29.9;
  p.h_p = 16.49;
  p.tau_p = p.tau_v;
  p.area = 25.0;
  p.beta_vrp = 0.82;
  p.horizon = 8.0;
  d.model = {0.04, 0.03};
  d.pmf = BundlePmf::truncated_poisson(10.0, 20);
  return d;
}

double improvement_pct(double cost_mixed, double cost_van_only) {
  return 100.0 * (cost_van_only - cost_mixed) / cost_van_only;
}

SeedOutcome run_case_seed(const Scenario& scenario, const CaseStudyConfig& config, int seed_index) {
  const auto& params = config.defaults.params;
  const auto& pmf = config.defaults.pmf;
  const auto& model = config.defaults.model;
  params.validate();

  SeedOutcome out;
  out.seed = derive_seed(scenario.seed, 2 * static_cast<std::uint64_t>(seed_index));
  const Points points = generate(scenario, out.seed);
  const Instance inst(points, scenario.depot_point(), config.metric);
  const auto summary = InstanceSummary::from(inst);
  out.n = summary.n;
  out.r_bar = summary.r_bar;
  out.tsp_len = summary.tsp_len;

  const PickupModel pickups(pmf, std::min(summary.n, config.gamma_cap));
  const auto opt =
      optimize_incentive(summary, params, pmf, model, std::cref(pickups), config.grid_points);
  out.z_star = opt.z_star;
  out.cost_expected = opt.cost_star;
  out.objective_grid = opt.grid;
  out.lambda_star = model.lambda(opt.z_star);
  out.expected_pickups = pickups(params.horizon, summary.n, out.lambda_star);
  out.pickups_exact = pickups.exact_for(summary.n);

  const auto trace = simulate_circle(summary.n, out.lambda_star, pmf, params.horizon,
                                     derive_seed(scenario.seed, 2 * static_cast<std::uint64_t>(seed_index) + 1));
  const double mu = pmf.mean();
  std::vector<char> picked(summary.n, 1);
  for (int p : trace.leftover()) picked[p] = 0;
  std::vector<int> left_idx;
  for (int p = 0; p < summary.n; ++p) {
    if (picked[p]) {
      out.payments += package_price(inst.r(p), inst.d(p), params, opt.z_star, mu);
    } else {
      left_idx.push_back(inst.tour().order[p]);
    }
  }
  // Original index order keeps the leftover CVRP identical to the van-only one when
  // nothing is picked up.
  std::sort(left_idx.begin(), left_idx.end());
  out.leftover_count = static_cast<int>(left_idx.size());
  out.leftover_points.resize(2, out.leftover_count);
  for (int k = 0; k < out.leftover_count; ++k) out.leftover_points.col(k) = points.col(left_idx[k]);

  out.leftover_routes =
      cvrp_solve(out.leftover_points, scenario.depot_point(), params.capacity, config.metric);
  out.cvrp_leftover_len = out.leftover_routes.total_length;
  out.cost_leftover_vans = van_only_cost(out.cvrp_leftover_len, out.leftover_count, params);
  out.cost_mixed = out.payments + out.cost_leftover_vans;

  out.cvrp_all_len = cvrp_solve(points, scenario.depot_point(), params.capacity, config.metric).total_length;
  out.cost_van_only = van_only_cost(out.cvrp_all_len, summary.n, params);
  out.improvement_pct = improvement_pct(out.cost_mixed, out.cost_van_only);
  return out;
}

namespace {

template <typename Get>
MeanSd mean_sd(const std::vector<SeedOutcome>& outcomes, Get get) {
  MeanSd r;
  const auto k = outcomes.size();
  if (k == 0) return r;
  for (const auto& o : outcomes) r.mean += get(o);
  r.mean /= static_cast<double>(k);
  if (k > 1) {
    double ss = 0.0;
    for (const auto& o : outcomes) ss += (get(o) - r.mean) * (get(o) - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(k - 1));
  }
  return r;
}

}  // namespace

CaseStudyReport run_case_study(const Scenario& scenario, const CaseStudyConfig& config,
                               int n_seeds) {
  scenario.validate();
  if (n_seeds < 1) throw InvalidArgument("case study needs at least one seed");
  CaseStudyReport rep;
  rep.scenario = scenario;
  rep.outcomes.resize(n_seeds);

  const int threads = std::max(1, std::min(config.threads, n_seeds));
  if (threads == 1) {
    for (int s = 0; s < n_seeds; ++s) rep.outcomes[s] = run_case_seed(scenario, config, s);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    for (int w = 0; w < threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (int s = w; s < n_seeds; s += threads) rep.outcomes[s] = run_case_seed(scenario, config, s);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : workers) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const auto& o = rep.outcomes;
  rep.z_star = mean_sd(o, [](const SeedOutcome& s) { return s.z_star; });
  rep.cost_mixed = mean_sd(o, [](const SeedOutcome& s) { return s.cost_mixed; });
  rep.cost_van_only = mean_sd(o, [](const SeedOutcome& s) { return s.cost_van_only; });
  rep.improvement_pct = mean_sd(o, [](const SeedOutcome& s) { return s.improvement_pct; });
  rep.leftover_count = mean_sd(o, [](const SeedOutcome& s) { return double(s.leftover_count); });
  rep.tsp_len = mean_sd(o, [](const SeedOutcome& s) { return s.tsp_len; });
  rep.cvrp_all_len = mean_sd(o, [](const SeedOutcome& s) { return s.cvrp_all_len; });
  rep.cvrp_leftover_len = mean_sd(o, [](const SeedOutcome& s) { return s.cvrp_leftover_len; });
  return rep;
}

}  // namespace dsp
