#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dsp {

enum class Metric { L1, L2 };

// Column j is destination j, in miles.
using Points = Eigen::Matrix2Xd;
using Point = Eigen::Vector2d;

template <typename DerivedA, typename DerivedB>
double distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
                Metric metric) {
  return metric == Metric::L1 ? (a - b).template lpNorm<1>() : (a - b).norm();
}

Metric parse_metric(const std::string& name);
std::string to_string(Metric metric);

// Closed tour over point indices.
struct Tour {
  std::vector<int> order;
  double length = 0.0;
};

double tour_length(const std::vector<int>& order, const Points& points, Metric metric);

struct TspOptions {
  // 2-opt stops after move_cap_factor * n accepted moves.
  int move_cap_factor = 50;
  // Or-opt segment moves (length 1..3) alternated with 2-opt until neither improves.
  bool or_opt = true;
  // Double-bridge kicks of the neighbour-list search run before the full sweeps; each
  // is kept only if it shortens the tour. 0 disables the search.
  int kicks_per_point = 5;
  std::uint64_t seed = 1;
};

// Nearest neighbour from index 0 (lowest index wins ties), the kicked neighbour-list
// search, then first-improvement 2-opt and optional Or-opt to a local optimum.
// Deterministic for fixed options.
Tour tsp_tour(const Points& points, Metric metric, const TspOptions& options = {});

// Nearest-neighbour construction only.
Tour nearest_neighbor_tour(const Points& points, Metric metric);

// Local search in place on a closed tour; returns the number of improving moves.
int improve_tour(std::vector<int>& order, const Points& points, Metric metric,
                 const TspOptions& options = {});

// Destinations with the depot, a distance metric and the tour-derived per-package
// quantities. Positions p = 0..n-1 follow the tour; r(p) is the long-haul distance of
// the destination at position p and d(p) the mean of its two tour-adjacent gaps.
class Instance {
 public:
  Instance(Points points, Point depot = Point::Zero(), Metric metric = Metric::L1,
           const TspOptions& options = {});
  Instance(Points points, Point depot, Metric metric, Tour tour);

  int size() const { return static_cast<int>(points_.cols()); }
  const Points& points() const { return points_; }
  const Point& depot() const { return depot_; }
  Metric metric() const { return metric_; }
  const Tour& tour() const { return tour_; }

  // Destination at tour position p.
  auto at(int p) const { return points_.col(tour_.order[p]); }
  double r(int p) const { return r_[p]; }
  double d(int p) const { return d_[p]; }
  const Eigen::VectorXd& r_list() const { return r_; }
  const Eigen::VectorXd& d_list() const { return d_; }
  double r_bar() const { return size() > 0 ? r_.mean() : 0.0; }
  double dist(int p, int q) const { return distance(at(p), at(q), metric_); }

 private:
  void derive();

  Points points_;
  Point depot_;
  Metric metric_;
  Tour tour_;
  Eigen::VectorXd r_;
  Eigen::VectorXd d_;
};

struct CvrpSolution {
  // Each route lists point indices; the depot is implied at both ends.
  std::vector<std::vector<int>> routes;
  double total_length = 0.0;
  int capacity = 0;
  std::string method;  // "savings" or "split"
};

double route_length(const std::vector<int>& route, const Points& points, const Point& depot,
                    Metric metric);

// Clarke-Wright savings with unit demands and capacity V, followed by local search
// on each route (depot included).
CvrpSolution cvrp_savings(const Points& points, const Point& depot, int capacity, Metric metric);

// Optimal split of a closed tour into consecutive segments of at most V stops, each
// served depot -> segment -> depot, followed by the same per-route local search.
CvrpSolution cvrp_split(const Points& points, const Point& depot, int capacity, Metric metric,
                        const Tour& tour);

// Shorter of cvrp_savings and cvrp_split; the split uses `tour` when given, else a
// fresh tsp_tour over the points.
CvrpSolution cvrp_solve(const Points& points, const Point& depot, int capacity, Metric metric,
                        const Tour* tour = nullptr);

struct CvrpBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// max{2 n rbar / V, L_tsp} <= L_cvrp <= 2 (n/V + 1) rbar + L_tsp.
CvrpBounds cvrp_bounds(const Points& points, const Point& depot, int capacity, double tsp_len,
                       Metric metric);

// 2k rbar / V + beta sqrt(k A).
double cvrp_continuous(double k, double r_bar, double area, int capacity, double beta);

struct NeighborDensity {
  double bin_width = 0.0;
  Eigen::VectorXd density;  // integrates to 1 over [0, bins * bin_width]
  double mean = 0.0;
  double sd = 0.0;
  double q75 = 0.0;
  double q95 = 0.0;
  std::vector<double> samples;  // consecutive tour distances, closing edge included
};

// Histogram of distances between tour neighbours. range_max <= 0 uses the largest
// observed distance; values beyond range_max land in the last bin.
NeighborDensity neighbor_density(const Tour& tour, const Points& points, Metric metric, int bins,
                                 double range_max = 0.0);
inline NeighborDensity neighbor_density(const Instance& inst, int bins, double range_max = 0.0) {
  return neighbor_density(inst.tour(), inst.points(), inst.metric(), bins, range_max);
}

// Points from CSV with header "x,y".
Points read_points_csv(const std::string& path);

}  // namespace dsp
