#include "dsp/pricing.hpp"

#include "dsp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dsp {

void CostParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string("cost parameter ") + name + " must be positive");
    }
  };
  positive(zeta_p, "zeta_p");
  positive(h_p, "h_p");
  positive(v_p, "v_p");
  positive(zeta_v, "zeta_v");
  positive(h_v, "h_v");
  positive(v_v, "v_v");
  positive(area, "area");
  positive(beta_vrp, "beta_vrp");
  positive(horizon, "horizon");
  if (capacity < 1) throw InvalidArgument("cost parameter capacity must be >= 1");
  if (!(tau_p >= 0.0) || !(tau_v >= 0.0)) {
    throw InvalidArgument("delivery times tau_p and tau_v must be nonnegative");
  }
}

double IncentiveModel::lambda(double z) const { return std::max(0.0, intercept + slope * z); }

InstanceSummary InstanceSummary::from(const Instance& inst) {
  InstanceSummary s;
  s.n = inst.size();
  s.r_bar = inst.r_bar();
  s.tsp_len = inst.tour().length;
  s.r_list = inst.r_list();
  s.d_list = inst.d_list();
  return s;
}

PickupModel::PickupModel(BundlePmf pmf, int n_max, double quad_tol)
    : table_(default_gamma_cache().get(pmf, std::max(n_max, std::max(1, pmf.m() - 1)))),
      n_max_(n_max),
      quad_tol_(quad_tol) {}

double PickupModel::operator()(double horizon, int n, double lambda) const {
  if (n <= 0 || !(lambda > 0.0) || !(horizon > 0.0)) return 0.0;
  if (exact_for(n)) return expected_pickups_circle({horizon, n, lambda}, *table_);
  return n * alpha({horizon, lambda, quad_tol_}, *table_).alpha;
}

GammaCache& default_gamma_cache() {
  static GammaCache cache;
  return cache;
}

double package_price(double r, double d, const CostParams& params, double z, double mu) {
  if (params.h_p + z < 0.0) throw DomainError("payment rate h_p + z must be nonnegative");
  if (!(mu >= 1.0)) throw DomainError("mean bundle size must be >= 1");
  return params.zeta_p * (r / mu + d) + (params.h_p + z) * delivery_time(r, d, params, mu);
}

double delivery_time(double r, double d, const CostParams& params, double mu) {
  return r / (mu * params.v_p) + d / params.v_p + params.tau_p;
}

BundlePrices bundle_prices(int start, int k, const Instance& inst, const CostParams& params,
                           double z) {
  const int n = inst.size();
  if (start < 0 || start >= n || k < 1 || k > n) {
    throw InvalidArgument("bundle must start inside the tour and hold 1..n packages");
  }
  const double rate = params.h_p + z;
  if (rate < 0.0) throw DomainError("payment rate h_p + z must be nonnegative");

  auto pos = [n, start](int j) { return (start + j) % n; };
  double path = 0.0;
  for (int j = 0; j + 1 < k; ++j) path += inst.dist(pos(j), pos(j + 1));
  const double r_first = inst.r(start);

  BundlePrices out;
  out.price1 = params.zeta_p * (r_first + path) +
               rate * (r_first / params.v_p + path / params.v_p + k * params.tau_p);

  double r_sum = 0.0;
  double d_sum = 0.0;
  for (int j = 0; j < k; ++j) {
    r_sum += inst.r(pos(j));
    d_sum += inst.d(pos(j));
  }
  out.price2 = params.zeta_p * (r_sum / k + d_sum) +
               rate * (r_sum / (k * params.v_p) + d_sum / params.v_p + k * params.tau_p);
  return out;
}

double price_sum(const InstanceSummary& summary, const CostParams& params, double z, double mu) {
  const double per_mile = params.zeta_p + (params.h_p + z) / params.v_p;
  return per_mile * (summary.r_bar * summary.n / mu + summary.tsp_len) +
         summary.n * (params.h_p + z) * params.tau_p;
}

namespace {

double expected_pickups(double z, const InstanceSummary& summary, const CostParams& params,
                        const IncentiveModel& model, const PickupProvider& pickups) {
  const double lambda = model.lambda(z);
  if (lambda <= 0.0) return 0.0;
  return std::clamp(pickups(params.horizon, summary.n, lambda), 0.0, double(summary.n));
}

}  // namespace

double expected_private_cost(double z, const InstanceSummary& summary, const CostParams& params,
                             const BundlePmf& pmf, const IncentiveModel& model,
                             const PickupProvider& pickups) {
  if (params.h_p + z < 0.0) throw DomainError("payment rate h_p + z must be nonnegative");
  if (summary.n == 0) return 0.0;
  const double c = expected_pickups(z, summary, params, model, pickups);
  const double mu = pmf.mean();
  const double per_mile = params.zeta_p + (params.h_p + z) / params.v_p;
  return c / summary.n * per_mile * (summary.n * summary.r_bar / mu + summary.tsp_len) +
         c * (params.h_p + z) * params.tau_p;
}

double leftover_van_cost(double z, const InstanceSummary& summary, const CostParams& params,
                         const IncentiveModel& model, const PickupProvider& pickups) {
  const double c = expected_pickups(z, summary, params, model, pickups);
  const double left = std::max(0.0, summary.n - c);
  return params.van_mile_rate() *
             cvrp_continuous(left, summary.r_bar, params.area, params.capacity, params.beta_vrp) +
         left * params.h_v * params.tau_v;
}

double total_cost(double z, const InstanceSummary& summary, const CostParams& params,
                  const BundlePmf& pmf, const IncentiveModel& model, const PickupProvider& pickups) {
  return expected_private_cost(z, summary, params, pmf, model, pickups) +
         leftover_van_cost(z, summary, params, model, pickups);
}

double total_cost(double z, const InstanceSummary& summary, const CostParams& params,
                  const BundlePmf& pmf, const IncentiveModel& model) {
  const PickupModel pickups(pmf, std::min(summary.n, kDefaultGammaCap));
  return total_cost(z, summary, params, pmf, model, std::cref(pickups));
}

double van_only_cost(double cvrp_len, int n, const CostParams& params) {
  return params.van_mile_rate() * cvrp_len + n * params.h_v * params.tau_v;
}

ZBounds z_bounds(const CostParams& params) {
  double upper = (params.van_mile_rate() - params.zeta_p) * params.v_p;
  if (params.tau_p > 0.0) upper = std::max(upper, params.h_v * params.tau_v / params.tau_p);
  return {-params.h_p, upper - params.h_p};
}

IncentiveOptimum optimize_incentive(const InstanceSummary& summary, const CostParams& params,
                                    const BundlePmf& pmf, const IncentiveModel& model,
                                    const PickupProvider& pickups, int grid_points) {
  const auto bounds = z_bounds(params);
  if (bounds.hi < bounds.lo) throw DomainError("empty incentive interval");
  grid_points = std::max(grid_points, 2);
  auto cost = [&](double z) { return total_cost(z, summary, params, pmf, model, pickups); };

  IncentiveOptimum out;
  out.grid.reserve(grid_points);
  int best = 0;
  for (int k = 0; k < grid_points; ++k) {
    const double z = (k + 1 == grid_points)
                         ? bounds.hi
                         : bounds.lo + (bounds.hi - bounds.lo) * k / (grid_points - 1);
    out.grid.emplace_back(z, cost(z));
    if (out.grid[k].second < out.grid[best].second) best = k;
  }

  double a = out.grid[std::max(0, best - 1)].first;
  double b = out.grid[std::min(grid_points - 1, best + 1)].first;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = cost(c);
  double fd = cost(d);
  while (b - a > 1e-7 * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = cost(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = cost(d);
    }
  }

  out.z_star = out.grid[best].first;
  out.cost_star = out.grid[best].second;
  const double candidates[] = {c, d, a, b};
  for (double z : candidates) {
    const double f = cost(z);
    if (f < out.cost_star) {
      out.cost_star = f;
      out.z_star = z;
    }
  }
  return out;
}

IncentiveOptimum optimize_incentive(const InstanceSummary& summary, const CostParams& params,
                                    const BundlePmf& pmf, const IncentiveModel& model) {
  const PickupModel pickups(pmf, std::min(summary.n, kDefaultGammaCap));
  return optimize_incentive(summary, params, pmf, model, std::cref(pickups));
}

double advantage_condition(const CostParams& params, double r_star, double mu) {
  return params.van_mile_rate() * 2.0 * r_star / params.capacity -
         (params.zeta_p + params.h_p / params.v_p) * r_star / mu -
         (params.h_p * params.tau_p - params.h_v * params.tau_v);
}

double asymptotic_advantage(const CostParams& params, double r_star, double mu, double z,
                            double alpha_t) {
  if (!(alpha_t >= 0.0 && alpha_t <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  return -alpha_t * (advantage_condition(params, r_star, mu) -
                     z * (r_star / (params.v_p * mu) + params.tau_p));
}

}  // namespace dsp
