#include "dsp/asymptotic.hpp"
#include "dsp/config.hpp"
#include "dsp/error.hpp"
#include "dsp/exact.hpp"
#include "dsp/pmf_spec.hpp"
#include "dsp/pricing.hpp"
#include "dsp/rng.hpp"
#include "dsp/routing.hpp"
#include "dsp/scenarios.hpp"
#include "dsp/simulator.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string format = "json";
};

std::uint64_t resolve_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("DSP_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw dsp::ConfigError("DSP_SEED must be a nonnegative integer, got '" + std::string(s) + "'");
    }
    return v;
  }
  return 1;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dsp::ConfigError("cannot write " + path);
  out << text;
}

// Top-level scalar fields as one CSV header and one row.
std::string scalars_csv(const Json& j) {
  std::string head;
  std::string row;
  for (const auto& [key, value] : j.items()) {
    if (value.is_structured() || key == "schema") continue;
    head += (head.empty() ? "" : ",") + key;
    row += (row.empty() ? "" : ",") + (value.is_string() ? value.get<std::string>() : value.dump());
  }
  return head + "\n" + row + "\n";
}

void emit(const Json& j, const Common& c) {
  if (c.format == "csv") {
    std::cout << scalars_csv(j);
  } else {
    std::cout << j.dump(2) << "\n";
  }
}

Json envelope(const std::string& command) {
  Json j;
  j["schema"] = 1;
  j["command"] = command;
  return j;
}

Json params_json(const dsp::Defaults& d) {
  const auto& p = d.params;
  Json j;
  j["zeta_p"] = p.zeta_p;
  j["h_p"] = p.h_p;
  j["v_p"] = p.v_p;
  j["tau_p"] = p.tau_p;
  j["zeta_v"] = p.zeta_v;
  j["h_v"] = p.h_v;
  j["v_v"] = p.v_v;
  j["tau_v"] = p.tau_v;
  j["capacity"] = p.capacity;
  j["area"] = p.area;
  j["beta_vrp"] = p.beta_vrp;
  j["horizon"] = p.horizon;
  j["lambda_slope"] = d.model.slope;
  j["lambda_intercept"] = d.model.intercept;
  Json probs = Json::array();
  for (int k = 1; k <= d.pmf.m(); ++k) probs.push_back(d.pmf.f(k));
  j["pmf"] = probs;
  return j;
}

dsp::Point parse_depot(const std::string& spec, double side) {
  if (spec == "center") return {side / 2.0, side / 2.0};
  if (spec == "corner" || spec == "origin") return {0.0, 0.0};
  const auto comma = spec.find(',');
  double x = 0.0;
  double y = 0.0;
  if (comma != std::string::npos) {
    const auto rx = std::from_chars(spec.data(), spec.data() + comma, x);
    const auto ry = std::from_chars(spec.data() + comma + 1, spec.data() + spec.size(), y);
    if (rx.ec == std::errc() && ry.ec == std::errc() && rx.ptr == spec.data() + comma &&
        ry.ptr == spec.data() + spec.size()) {
      return {x, y};
    }
  }
  throw dsp::ConfigError("--depot expects center, corner or x,y; got '" + spec + "'");
}

Json point_json(const dsp::Point& p) { return Json::array({p.x(), p.y()}); }

// Defaults, then the params file, then explicit flags.
dsp::Defaults resolve_defaults(const std::string& params_path, const std::string& pmf_spec) {
  auto d = dsp::default_params();
  if (!params_path.empty()) dsp::apply_config(dsp::read_config_file(params_path), d);
  if (!pmf_spec.empty()) d.pmf = dsp::parse_pmf_spec(pmf_spec);
  return d;
}

std::string routes_csv(const std::vector<std::vector<int>>& routes, const dsp::Points& pts,
                       const dsp::Point& depot) {
  std::ostringstream out;
  out.precision(17);
  out << "route,stop,x,y\n";
  for (std::size_t r = 0; r < routes.size(); ++r) {
    out << r << ",depot," << depot.x() << "," << depot.y() << "\n";
    for (std::size_t k = 0; k < routes[r].size(); ++k) {
      const auto p = pts.col(routes[r][k]);
      out << r << "," << k << "," << p.x() << "," << p.y() << "\n";
    }
    out << r << ",depot," << depot.x() << "," << depot.y() << "\n";
  }
  return out.str();
}

std::string density_csv(const dsp::NeighborDensity& nd) {
  std::ostringstream out;
  out.precision(17);
  out << "bin_lo,bin_hi,density\n";
  for (Eigen::Index b = 0; b < nd.density.size(); ++b) {
    out << b * nd.bin_width << "," << (b + 1) * nd.bin_width << "," << nd.density[b] << "\n";
  }
  return out.str();
}

// ---- subcommands ---------------------------------------------------------------

struct ExactArgs {
  std::string pmf;
  int n = 0;
  double lambda = 0.0;
  double t = 0.0;
  std::string topology = "circle";
  std::string sweep;
};

// "t0:t1:steps" -> steps + 1 evenly spaced times from t0 to t1.
std::vector<double> parse_sweep(const std::string& spec) {
  std::vector<double> parts;
  std::size_t begin = 0;
  while (true) {
    const auto end = spec.find(':', begin);
    const auto field = spec.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size()) {
      throw dsp::ConfigError("--sweep expects t0:t1:steps, got '" + spec + "'");
    }
    parts.push_back(v);
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  const int steps = parts.size() == 3 ? static_cast<int>(parts[2]) : 0;
  if (parts.size() != 3 || steps < 1 || steps != parts[2] || parts[0] < 0.0 || parts[1] < parts[0]) {
    throw dsp::ConfigError("--sweep expects t0:t1:steps with 0 <= t0 <= t1 and integer steps >= 1");
  }
  std::vector<double> times;
  for (int k = 0; k <= steps; ++k) times.push_back(parts[0] + (parts[1] - parts[0]) * k / steps);
  return times;
}

int run_exact(const ExactArgs& a, const Common& c) {
  const auto pmf = dsp::parse_pmf_spec(a.pmf);
  const auto tab = dsp::build_gamma(pmf, a.n);
  const bool line = a.topology == "line";
  auto picked = [&](double t) {
    const dsp::ExpectationQuery q{t, a.n, a.lambda};
    return line ? dsp::expected_pickups_line(q, tab) : dsp::expected_pickups_circle(q, tab);
  };
  if (!a.sweep.empty()) {
    std::ostringstream out;
    out.precision(17);
    out << "t,value\n";
    for (double t : parse_sweep(a.sweep)) out << t << "," << picked(t) << "\n";
    std::cout << out.str();
    return 0;
  }
  const dsp::ExpectationQuery q{a.t, a.n, a.lambda};
  Json j = envelope("exact");
  j["config"] = {{"pmf", a.pmf}, {"n", a.n}, {"lambda", a.lambda}, {"t", a.t}, {"topology", a.topology}};
  j["R"] = dsp::expected_remaining_line(q, tab);
  j["K"] = dsp::expected_pickups_line(q, tab);
  j["C"] = dsp::expected_pickups_circle(q, tab);
  j["value"] = picked(a.t);
  emit(j, c);
  return 0;
}

struct AlphaArgs {
  std::string pmf;
  double lambda = 1.0;
  double t = std::numeric_limits<double>::infinity();
  double tol = dsp::kDefaultQuadTol;
  int pinsky = 0;  // m of the point-mass closed form, 0 when not requested
};

int run_alpha(const AlphaArgs& a, const Common& c) {
  if (a.pmf.empty() && a.pinsky == 0) throw dsp::ConfigError("alpha needs --pmf or --pinsky");
  Json j = envelope("alpha");
  j["config"] = {{"pmf", a.pmf}, {"lambda", a.lambda}, {"t", std::isinf(a.t) ? Json("inf") : Json(a.t)},
                 {"tol", a.tol}, {"pinsky", a.pinsky}};
  if (!a.pmf.empty()) {
    const auto pmf = dsp::parse_pmf_spec(a.pmf);
    const auto tab = dsp::build_gamma(pmf, std::max(1, pmf.m() - 1));
    const auto r = dsp::alpha({a.t, a.lambda, a.tol}, tab);
    j["alpha"] = r.alpha;
    j["quad_error_estimate"] = r.quad_error_estimate;
  }
  if (a.pinsky > 0) {
    const auto p = dsp::alpha_pinsky(a.pinsky, a.tol);
    j["alpha_pinsky"] = p.alpha;
    j["pinsky_error_estimate"] = p.quad_error_estimate;
  }
  emit(j, c);
  return 0;
}

struct SimulateArgs {
  std::string pmf;
  int n = 0;
  double lambda = 0.0;
  double t = 0.0;
  int reps = 1000;
  std::string topology = "circle";
  std::string trace;
};

int run_simulate(const SimulateArgs& a, const Common& c) {
  const auto pmf = dsp::parse_pmf_spec(a.pmf);
  const auto topo = a.topology == "line" ? dsp::Topology::Line : dsp::Topology::Circle;
  const auto seed = resolve_seed(c);
  Json j = envelope("simulate");
  j["config"] = {{"pmf", a.pmf}, {"n", a.n},         {"lambda", a.lambda},    {"t", a.t},
                 {"reps", a.reps}, {"seed", seed}, {"topology", a.topology}, {"threads", c.threads}};
  const auto est = dsp::mc_expected_pickups(a.n, a.lambda, pmf, a.t, a.reps, seed, topo, c.threads);
  j["mean"] = est.mean;
  j["stderr"] = est.std_error;
  if (a.n <= dsp::kDefaultGammaCap) {
    const auto tab = dsp::build_gamma(pmf, a.n);
    const dsp::ExpectationQuery q{a.t, a.n, a.lambda};
    const double exact = topo == dsp::Topology::Line ? dsp::expected_pickups_line(q, tab)
                                                     : dsp::expected_pickups_circle(q, tab);
    j["exact"] = exact;
    j["z_score"] = est.std_error > 0.0 ? (est.mean - exact) / est.std_error : 0.0;
  }
  const auto small = dsp::build_gamma(pmf, std::max(1, pmf.m() - 1));
  j["alpha_times_n"] = a.n * dsp::alpha({a.t, a.lambda}, small).alpha;
  if (!a.trace.empty()) {
    const auto tr = dsp::simulate(a.n, a.lambda, pmf, a.t, seed, topo);
    std::ostringstream out;
    out.precision(17);
    out << "time,location,size\n";
    for (const auto& b : tr.accepted()) out << b.time << "," << b.location << "," << b.size << "\n";
    write_file(a.trace, out.str());
    j["trace"] = a.trace;
    j["trace_picked"] = tr.picked_count();
  }
  emit(j, c);
  return 0;
}

struct PointsArgs {
  std::string instance;
  std::string scenario = "uniform";
  int n = 2000;
  double side = 5.0;
  std::string depot;  // origin for instance files, center for generated squares
  std::string metric = "l1";

  std::string depot_spec() const {
    if (!depot.empty()) return depot;
    return instance.empty() ? "center" : "origin";
  }
};

dsp::Points load_points(const PointsArgs& a, std::uint64_t seed) {
  if (!a.instance.empty()) return dsp::read_points_csv(a.instance);
  dsp::Scenario sc;
  sc.kind = dsp::parse_scenario_kind(a.scenario);
  if (sc.kind == dsp::ScenarioKind::CustomCsv) throw dsp::ConfigError("use --instance for CSV points");
  sc.n = a.n;
  sc.side = a.side;
  return dsp::generate(sc, seed);
}

Json points_config(const PointsArgs& a) {
  Json j;
  if (!a.instance.empty()) {
    j["instance"] = a.instance;
  } else {
    j["scenario"] = a.scenario;
    j["n"] = a.n;
    j["side"] = a.side;
  }
  j["depot"] = a.depot_spec();
  j["metric"] = a.metric;
  return j;
}

struct RouteArgs {
  PointsArgs pts;
  bool tsp = false;
  bool cvrp = false;
  int capacity = 200;
  std::string routes_out;
};

int run_route(const RouteArgs& a, const Common& c) {
  const auto seed = resolve_seed(c);
  const auto metric = dsp::parse_metric(a.pts.metric);
  const auto points = load_points(a.pts, seed);
  const auto depot = parse_depot(a.pts.depot_spec(), a.pts.side);
  const bool want_tsp = a.tsp || !a.cvrp;
  const bool want_cvrp = a.cvrp || !a.tsp;
  Json j = envelope("route");
  j["config"] = points_config(a.pts);
  j["config"]["seed"] = seed;
  j["config"]["capacity"] = a.capacity;
  j["config"]["depot_point"] = point_json(depot);
  j["n"] = points.cols();
  const auto tour = dsp::tsp_tour(points, metric);
  std::vector<std::vector<int>> routes;
  if (want_tsp) {
    j["tsp_length"] = tour.length;
    routes.push_back(tour.order);
  }
  if (want_cvrp) {
    const auto sol = dsp::cvrp_solve(points, depot, a.capacity, metric, &tour);
    const auto b = dsp::cvrp_bounds(points, depot, a.capacity, tour.length, metric);
    j["cvrp_length"] = sol.total_length;
    j["cvrp_routes"] = sol.routes.size();
    j["cvrp_method"] = sol.method;
    j["cvrp_lower_bound"] = b.lower;
    j["cvrp_upper_bound"] = b.upper;
    routes = sol.routes;
  }
  if (!a.routes_out.empty()) {
    write_file(a.routes_out, routes_csv(routes, points, depot));
    j["routes_out"] = a.routes_out;
  }
  emit(j, c);
  return 0;
}

struct OptimizeArgs {
  PointsArgs pts;
  std::string params;
  std::string pmf;
  std::string prices_out;
};

int run_optimize(const OptimizeArgs& a, const Common& c) {
  const auto seed = resolve_seed(c);
  const auto defaults = resolve_defaults(a.params, a.pmf);
  const auto metric = dsp::parse_metric(a.pts.metric);
  const auto points = load_points(a.pts, seed);
  const auto depot = parse_depot(a.pts.depot_spec(), a.pts.side);
  const dsp::Instance inst(points, depot, metric);
  const auto summary = dsp::InstanceSummary::from(inst);
  const auto& p = defaults.params;

  const dsp::PickupModel pickups(defaults.pmf, std::min(summary.n, dsp::kDefaultGammaCap));
  const auto opt = dsp::optimize_incentive(summary, p, defaults.pmf, defaults.model, std::cref(pickups));
  const auto cvrp = dsp::cvrp_solve(points, depot, p.capacity, metric, &inst.tour());
  const double van = dsp::van_only_cost(cvrp.total_length, summary.n, p);
  const auto bounds = dsp::z_bounds(p);

  Json j = envelope("optimize");
  j["config"] = points_config(a.pts);
  j["config"]["seed"] = seed;
  j["config"]["params_file"] = a.params;
  j["config"]["depot_point"] = point_json(depot);
  j["config"]["params"] = params_json(defaults);
  j["n"] = summary.n;
  j["r_bar"] = summary.r_bar;
  j["tsp_length"] = summary.tsp_len;
  j["cvrp_length"] = cvrp.total_length;
  j["z_lo"] = bounds.lo;
  j["z_hi"] = bounds.hi;
  j["z_star"] = opt.z_star;
  j["lambda_star"] = defaults.model.lambda(opt.z_star);
  j["expected_pickups"] = pickups(p.horizon, summary.n, defaults.model.lambda(opt.z_star));
  j["pickups_exact"] = pickups.exact_for(summary.n);
  j["cost_star"] = opt.cost_star;
  j["cost_van_only"] = van;
  j["improvement_pct"] = dsp::improvement_pct(opt.cost_star, van);

  if (!a.prices_out.empty()) {
    const double mu = defaults.pmf.mean();
    std::ostringstream out;
    out.precision(17);
    out << "index,x,y,r,d,price,time_est\n";
    for (int k = 0; k < summary.n; ++k) {
      const auto x = inst.at(k);
      out << inst.tour().order[k] << "," << x.x() << "," << x.y() << "," << inst.r(k) << "," << inst.d(k)
          << "," << dsp::package_price(inst.r(k), inst.d(k), p, opt.z_star, mu) << ","
          << dsp::delivery_time(inst.r(k), inst.d(k), p, mu) << "\n";
    }
    write_file(a.prices_out, out.str());
    j["per_package_prices"] = a.prices_out;
  } else {
    j["per_package_prices"] = nullptr;
  }
  emit(j, c);
  return 0;
}

struct CaseStudyArgs {
  std::string scenario = "uniform";
  std::string instance;
  int n = 2000;
  double side = 5.0;
  int seeds = 5;
  std::string depot = "center";
  std::string metric = "l1";
  std::string params;
  std::string pmf;
  std::string out;
  std::string objective_csv;
  std::string routes_csv;
  std::string density_csv;
};

Json mean_sd_json(const dsp::MeanSd& m) { return {{"mean", m.mean}, {"sd", m.sd}}; }

int run_case_study_cmd(const CaseStudyArgs& a, const Common& c) {
  dsp::Scenario sc;
  sc.kind = dsp::parse_scenario_kind(a.scenario);
  sc.n = a.n;
  sc.side = a.side;
  sc.seed = resolve_seed(c);
  sc.csv_path = a.instance;
  if (a.depot == "center") {
    sc.depot = dsp::DepotPlacement::Center;
  } else if (a.depot == "corner") {
    sc.depot = dsp::DepotPlacement::Corner;
  } else {
    throw dsp::ConfigError("--depot expects center or corner");
  }
  dsp::CaseStudyConfig cfg;
  cfg.defaults = resolve_defaults(a.params, a.pmf);
  cfg.metric = dsp::parse_metric(a.metric);
  cfg.threads = c.threads;

  const auto rep = dsp::run_case_study(sc, cfg, a.seeds);

  Json j = envelope("case-study");
  j["config"] = {{"scenario", dsp::to_string(sc.kind)},
                 {"n", sc.n},
                 {"side", sc.side},
                 {"seeds", a.seeds},
                 {"seed", sc.seed},
                 {"depot", a.depot},
                 {"depot_point", point_json(sc.depot_point())},
                 {"metric", a.metric},
                 {"params_file", a.params},
                 {"params", params_json(cfg.defaults)}};
  j["z_star"] = mean_sd_json(rep.z_star);
  j["cost_mixed"] = mean_sd_json(rep.cost_mixed);
  j["cost_van_only"] = mean_sd_json(rep.cost_van_only);
  j["improvement_pct"] = mean_sd_json(rep.improvement_pct);
  j["leftover_count"] = mean_sd_json(rep.leftover_count);
  j["lengths"] = {{"tsp", mean_sd_json(rep.tsp_len)},
                  {"cvrp_all", mean_sd_json(rep.cvrp_all_len)},
                  {"cvrp_leftover", mean_sd_json(rep.cvrp_leftover_len)}};
  Json seeds = Json::array();
  for (const auto& o : rep.outcomes) {
    seeds.push_back({{"seed", o.seed},
                     {"n", o.n},
                     {"r_bar", o.r_bar},
                     {"z_star", o.z_star},
                     {"lambda_star", o.lambda_star},
                     {"cost_expected", o.cost_expected},
                     {"expected_pickups", o.expected_pickups},
                     {"pickups_exact", o.pickups_exact},
                     {"payments", o.payments},
                     {"cost_leftover_vans", o.cost_leftover_vans},
                     {"cost_mixed", o.cost_mixed},
                     {"cost_van_only", o.cost_van_only},
                     {"improvement_pct", o.improvement_pct},
                     {"leftover_count", o.leftover_count},
                     {"tsp", o.tsp_len},
                     {"cvrp_all", o.cvrp_all_len},
                     {"cvrp_leftover", o.cvrp_leftover_len}});
  }
  j["seeds"] = seeds;

  const auto& first = rep.outcomes.front();
  if (!a.objective_csv.empty()) {
    std::ostringstream out;
    out.precision(17);
    out << "z,cost\n";
    for (const auto& [z, cost] : first.objective_grid) out << z << "," << cost << "\n";
    write_file(a.objective_csv, out.str());
    j["objective_csv"] = a.objective_csv;
  }
  if (!a.routes_csv.empty()) {
    write_file(a.routes_csv, routes_csv(first.leftover_routes.routes, first.leftover_points, sc.depot_point()));
    j["routes_csv"] = a.routes_csv;
  }
  if (!a.density_csv.empty()) {
    const dsp::Instance inst(dsp::generate(sc, first.seed), sc.depot_point(), cfg.metric);
    write_file(a.density_csv, density_csv(dsp::neighbor_density(inst, 50, 1.0)));
    j["density_csv"] = a.density_csv;
  }

  const auto text = j.dump(2) + "\n";
  if (!a.out.empty()) write_file(a.out, text);
  if (c.format == "csv") {
    std::cout << scalars_csv(j);
  } else {
    std::cout << text;
  }
  return 0;
}

struct DensityArgs {
  std::string scenario = "uniform";
  int n = 1000;
  double side = 5.0;
  int seeds = 50;
  int bins = 50;
  double range = 1.0;
  std::string metric = "l1";
  std::string out;
};

int run_density(const DensityArgs& a, const Common& c) {
  dsp::Scenario sc;
  sc.kind = dsp::parse_scenario_kind(a.scenario);
  if (sc.kind == dsp::ScenarioKind::CustomCsv) throw dsp::ConfigError("tsp-density needs a generated scenario");
  sc.n = a.n;
  sc.side = a.side;
  sc.seed = resolve_seed(c);
  sc.validate();
  if (a.seeds < 1) throw dsp::ConfigError("--seeds must be >= 1");
  const auto metric = dsp::parse_metric(a.metric);

  Eigen::VectorXd density = Eigen::VectorXd::Zero(a.bins);
  double mean = 0.0, sd = 0.0, q75 = 0.0, q95 = 0.0;
  double bin_width = 0.0;
  for (int s = 0; s < a.seeds; ++s) {
    const auto pts = dsp::generate(sc, dsp::derive_seed(sc.seed, s));
    const auto nd = dsp::neighbor_density(dsp::tsp_tour(pts, metric), pts, metric, a.bins, a.range);
    density += nd.density;
    mean += nd.mean;
    sd += nd.sd;
    q75 += nd.q75;
    q95 += nd.q95;
    bin_width = nd.bin_width;
  }
  dsp::NeighborDensity avg;
  avg.bin_width = bin_width;
  avg.density = density / a.seeds;

  Json j = envelope("tsp-density");
  j["config"] = {{"scenario", a.scenario}, {"n", a.n},        {"side", a.side},     {"seeds", a.seeds},
                 {"seed", sc.seed},        {"bins", a.bins},  {"range", a.range},   {"metric", a.metric}};
  j["mean"] = mean / a.seeds;
  j["sd"] = sd / a.seeds;
  j["q75"] = q75 / a.seeds;
  j["q95"] = q95 / a.seeds;
  if (!a.out.empty()) {
    write_file(a.out, density_csv(avg));
    j["out"] = a.out;
  }
  emit(j, c);
  return 0;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Base seed (falls back to DSP_SEED, then 1)");
  sub->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void add_points(CLI::App* sub, PointsArgs& p) {
  sub->add_option("--instance", p.instance, "Points CSV with header x,y");
  sub->add_option("--scenario", p.scenario, "Generated points: uniform or clusters");
  sub->add_option("--n", p.n, "Number of generated points")->check(CLI::PositiveNumber);
  sub->add_option("--side", p.side, "Square side in miles")->check(CLI::PositiveNumber);
  sub->add_option("--depot", p.depot, "center, corner, origin or x,y (default: origin for files, center otherwise)");
  sub->add_option("--metric", p.metric, "l1 or l2")->check(CLI::IsMember({"l1", "l2"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowd-sourced delivery pickup model: exact and asymptotic pickup counts, simulation, routing and incentive pricing"};
  app.require_subcommand(1);
  Common common;

  ExactArgs exact;
  auto* s_exact = app.add_subcommand("exact", "Expected remaining/picked packages from the exact recursion");
  s_exact->add_option("--pmf", exact.pmf, "Bundle-size pmf (det:m, uniform:a..b, tpois:mean,max, list:...)")->required();
  s_exact->add_option("--n", exact.n, "Number of packages")->required();
  s_exact->add_option("--lambda", exact.lambda, "Per-location request rate")->required();
  auto* exact_t = s_exact->add_option("--t", exact.t, "Time");
  s_exact->add_option("--topology", exact.topology, "circle (C) or line (K) for value and sweep")
      ->check(CLI::IsMember({"circle", "line"}));
  s_exact->add_option("--sweep", exact.sweep, "Print t,value CSV over t0:t1:steps instead of JSON")
      ->excludes(exact_t);
  add_common(s_exact, common);

  AlphaArgs alpha;
  auto* s_alpha = app.add_subcommand("alpha", "Limiting fraction of packages picked up");
  s_alpha->add_option("--pmf", alpha.pmf, "Bundle-size pmf");
  s_alpha->add_option("--lambda", alpha.lambda, "Per-location request rate");
  s_alpha->add_option("--t", alpha.t, "Time (default infinity)");
  s_alpha->add_option("--tol", alpha.tol, "Quadrature tolerance")->check(CLI::PositiveNumber);
  s_alpha->add_option("--pinsky", alpha.pinsky, "Also evaluate the closed form for bundles of exactly m at t = infinity")
      ->check(CLI::Range(1, 1000));
  add_common(s_alpha, common);

  SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Monte Carlo pickup counts");
  s_sim->add_option("--pmf", sim.pmf, "Bundle-size pmf")->required();
  s_sim->add_option("--n", sim.n, "Number of packages")->required();
  s_sim->add_option("--lambda", sim.lambda, "Per-location request rate")->required();
  s_sim->add_option("--t,--T", sim.t, "Horizon")->required();
  s_sim->add_option("--reps", sim.reps, "Replications")->check(CLI::Range(2, 100000000));
  s_sim->add_option("--topology", sim.topology, "circle or line")->check(CLI::IsMember({"circle", "line"}));
  s_sim->add_option("--trace", sim.trace, "Write the accepted requests of one replication to this CSV");
  add_common(s_sim, common);

  RouteArgs route;
  auto* s_route = app.add_subcommand("route", "TSP tour and capacitated vehicle routes");
  add_points(s_route, route.pts);
  s_route->add_option("file", route.pts.instance, "Points CSV (same as --instance)");
  s_route->add_flag("--tsp", route.tsp, "Report the TSP tour");
  s_route->add_flag("--cvrp", route.cvrp, "Report the vehicle routes");
  s_route->add_option("--capacity", route.capacity, "Vehicle capacity")->check(CLI::PositiveNumber);
  s_route->add_option("--routes-out", route.routes_out, "Write route geometry to this CSV");
  add_common(s_route, common);

  OptimizeArgs opt;
  auto* s_opt = app.add_subcommand("optimize", "Optimal incentive rate for an instance");
  add_points(s_opt, opt.pts);
  s_opt->add_option("--params", opt.params, "Cost parameters (JSON or key = value file)");
  s_opt->add_option("--pmf", opt.pmf, "Bundle-size pmf (overrides the params file)");
  s_opt->add_option("--prices-out", opt.prices_out, "Write per-package prices to this CSV");
  add_common(s_opt, common);

  CaseStudyArgs cs;
  auto* s_cs = app.add_subcommand("case-study", "Mixed strategy against vans alone over several seeds");
  s_cs->add_option("--scenario", cs.scenario, "uniform, clusters or csv");
  s_cs->add_option("--instance", cs.instance, "Points CSV for --scenario csv");
  s_cs->add_option("--n", cs.n, "Number of packages")->check(CLI::PositiveNumber);
  s_cs->add_option("--side", cs.side, "Square side in miles")->check(CLI::PositiveNumber);
  s_cs->add_option("--seeds", cs.seeds, "Independent realizations")->check(CLI::PositiveNumber);
  s_cs->add_option("--depot", cs.depot, "center or corner")->check(CLI::IsMember({"center", "corner"}));
  s_cs->add_option("--metric", cs.metric, "l1 or l2")->check(CLI::IsMember({"l1", "l2"}));
  s_cs->add_option("--params", cs.params, "Cost parameters (JSON or key = value file)");
  s_cs->add_option("--pmf", cs.pmf, "Bundle-size pmf (overrides the params file)");
  s_cs->add_option("--out", cs.out, "Also write the report JSON here");
  s_cs->add_option("--objective-csv", cs.objective_csv, "Objective over the z grid for the first seed");
  s_cs->add_option("--routes-csv", cs.routes_csv, "Leftover van routes for the first seed");
  s_cs->add_option("--density-csv", cs.density_csv, "Neighbour-distance histogram for the first seed");
  add_common(s_cs, common);

  DensityArgs dens;
  auto* s_dens = app.add_subcommand("tsp-density", "Distance between tour neighbours");
  s_dens->add_option("--scenario", dens.scenario, "uniform or clusters");
  s_dens->add_option("--n", dens.n, "Points per realization")->check(CLI::PositiveNumber);
  s_dens->add_option("--side", dens.side, "Square side in miles")->check(CLI::PositiveNumber);
  s_dens->add_option("--seeds", dens.seeds, "Realizations")->check(CLI::PositiveNumber);
  s_dens->add_option("--bins", dens.bins, "Histogram bins")->check(CLI::PositiveNumber);
  s_dens->add_option("--range", dens.range, "Histogram upper edge in miles")->check(CLI::PositiveNumber);
  s_dens->add_option("--metric", dens.metric, "l1 or l2")->check(CLI::IsMember({"l1", "l2"}));
  s_dens->add_option("--out", dens.out, "Write the averaged density to this CSV");
  add_common(s_dens, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*s_exact && exact.sweep.empty() && exact_t->count() == 0) {
      throw dsp::ConfigError("exact needs --t or --sweep");
    }
    if (*s_exact) return run_exact(exact, common);
    if (*s_alpha) return run_alpha(alpha, common);
    if (*s_sim) return run_simulate(sim, common);
    if (*s_route) return run_route(route, common);
    if (*s_opt) return run_optimize(opt, common);
    if (*s_cs) return run_case_study_cmd(cs, common);
    if (*s_dens) return run_density(dens, common);
  } catch (const dsp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dsp::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
