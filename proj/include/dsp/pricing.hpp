#pragma once

#include "dsp/asymptotic.hpp"
#include "dsp/bundle.hpp"
#include "dsp/exact.hpp"
#include "dsp/routing.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

namespace dsp {

// Economic constants. Distances in miles, times in hours, money in dollars.
struct CostParams {
  double zeta_p = 0.0;  // private per-mile cost
  double h_p = 0.0;     // private opportunity cost per hour
  double v_p = 0.0;     // private speed
  double tau_p = 0.0;   // private end-point delivery time
  double zeta_v = 0.0;  // van per-mile cost
  double h_v = 0.0;     // van driver wage per hour
  double v_v = 0.0;     // van speed
  double tau_v = 0.0;   // van end-point delivery time
  int capacity = 1;     // packages per van
  double area = 0.0;    // square miles
  double beta_vrp = 0.82;
  double horizon = 8.0;  // pickup window T

  // Throws InvalidArgument unless every field is positive (tau_p, tau_v >= 0).
  void validate() const;

  // Per-mile rate paid for van routes: zeta_v + h_v / v_v.
  double van_mile_rate() const { return zeta_v + h_v / v_v; }
};

// lambda(z) = max(0, intercept + slope * z).
struct IncentiveModel {
  double slope = 0.04;
  double intercept = 0.03;

  double lambda(double z) const;
};

struct InstanceSummary {
  int n = 0;
  double r_bar = 0.0;
  double tsp_len = 0.0;
  Eigen::VectorXd r_list;  // by tour position
  Eigen::VectorXd d_list;  // by tour position

  static InstanceSummary from(const Instance& inst);
};

// Expected circle pickups C(T, n, lambda): exact coefficient tables up to n_max,
// n * alpha(T, lambda) beyond.
class PickupModel {
 public:
  explicit PickupModel(BundlePmf pmf, int n_max = kDefaultGammaCap,
                       double quad_tol = kDefaultQuadTol);

  double operator()(double horizon, int n, double lambda) const;
  bool exact_for(int n) const { return n <= n_max_; }
  const BundlePmf& pmf() const { return table_->pmf(); }
  const GammaTable& table() const { return *table_; }

 private:
  std::shared_ptr<const GammaTable> table_;  // may cover more than n_max_
  int n_max_;
  double quad_tol_;
};

using PickupProvider = std::function<double(double horizon, int n, double lambda)>;

// Process-wide table cache used by the overloads that take no provider.
GammaCache& default_gamma_cache();

// Price for one package: zeta_p (r/mu + d) + (h_p + z)(r/(mu v_p) + d/v_p + tau_p).
// Throws DomainError when h_p + z < 0 or mu < 1.
double package_price(double r, double d, const CostParams& params, double z, double mu);

// r/(mu v_p) + d/v_p + tau_p.
double delivery_time(double r, double d, const CostParams& params, double mu);

struct BundlePrices {
  double price1 = 0.0;  // route-based price of the whole bundle
  double price2 = 0.0;  // sum of prorated per-package prices with proration k
  double discrepancy() const { return price2 - price1; }
};

// Both prices for the bundle of k packages starting at tour position `start`
// (wrapping around the tour). Throws InvalidArgument for an out-of-range bundle.
BundlePrices bundle_prices(int start, int k, const Instance& inst, const CostParams& params,
                           double z);

// Closed form of the sum of all package prices:
// (zeta_p + (h_p+z)/v_p)(sum r / mu + L_tsp) + n (h_p+z) tau_p.
double price_sum(const InstanceSummary& summary, const CostParams& params, double z, double mu);

double expected_private_cost(double z, const InstanceSummary& summary, const CostParams& params,
                             const BundlePmf& pmf, const IncentiveModel& model,
                             const PickupProvider& pickups);

double leftover_van_cost(double z, const InstanceSummary& summary, const CostParams& params,
                         const IncentiveModel& model, const PickupProvider& pickups);

double total_cost(double z, const InstanceSummary& summary, const CostParams& params,
                  const BundlePmf& pmf, const IncentiveModel& model, const PickupProvider& pickups);
double total_cost(double z, const InstanceSummary& summary, const CostParams& params,
                  const BundlePmf& pmf, const IncentiveModel& model);

// (zeta_v + h_v/v_v) L + n h_v tau_v.
double van_only_cost(double cvrp_len, int n, const CostParams& params);

struct ZBounds {
  double lo = 0.0;
  double hi = 0.0;
};

// lo = -h_p; hi = max{(van_mile_rate - zeta_p) v_p, h_v tau_v / tau_p} - h_p, the
// second candidate being dropped when tau_p == 0.
ZBounds z_bounds(const CostParams& params);

struct IncentiveOptimum {
  double z_star = 0.0;
  double cost_star = 0.0;
  // 64-point uniform certificate grid over [lo, hi] as (z, cost).
  std::vector<std::pair<double, double>> grid;
};

// Best grid point refined by golden-section search on its neighbouring bracket.
IncentiveOptimum optimize_incentive(const InstanceSummary& summary, const CostParams& params,
                                    const BundlePmf& pmf, const IncentiveModel& model,
                                    const PickupProvider& pickups, int grid_points = 64);
IncentiveOptimum optimize_incentive(const InstanceSummary& summary, const CostParams& params,
                                    const BundlePmf& pmf, const IncentiveModel& model);

// Upper bound on limsup (Cost_P - Cost_V)/n:
// -alpha ((van rate) 2 r*/V - (zeta_p + h_p/v_p) r*/mu - (h_p tau_p - h_v tau_v)
//         - z (r*/(v_p mu) + tau_p)).
double asymptotic_advantage(const CostParams& params, double r_star, double mu, double z,
                            double alpha_t);

// The z-free bracket of the bound; positive values guarantee some z beats vans alone.
double advantage_condition(const CostParams& params, double r_star, double mu);

}  // namespace dsp
