#pragma once

#include "dsp/bundle.hpp"
#include "dsp/exact.hpp"
#include "dsp/routing.hpp"

#include <cstdint>
#include <vector>

namespace dsp {

enum class Topology { Line, Circle };

struct AcceptedBundle {
  double time = 0.0;
  int location = 0;  // 0-based start position along the tour
  int size = 0;
};

// One realization of the request process up to the horizon.
class PickupTrace {
 public:
  PickupTrace(int n, double horizon, std::vector<AcceptedBundle> accepted,
              std::vector<int> leftover);

  int n() const { return n_; }
  double horizon() const { return horizon_; }
  // Accepted requests in time order.
  const std::vector<AcceptedBundle>& accepted() const { return accepted_; }
  // Positions still available at the horizon, ascending.
  const std::vector<int>& leftover() const { return leftover_; }

  // Packages picked up in [0, t], t <= horizon.
  int picked_count_at(double t) const;
  int picked_count() const { return n_ - static_cast<int>(leftover_.size()); }

  // Checks pairwise disjointness (mod n), strictly increasing times, and the
  // count identity between accepted sizes and the leftover set.
  bool consistent(Topology topology) const;

 private:
  int n_;
  double horizon_;
  std::vector<AcceptedBundle> accepted_;
  std::vector<int> leftover_;
  std::vector<int> cumulative_;
};

// Superposed request stream at rate n*lambda with uniform start positions and sizes
// drawn from the pmf. A request is accepted iff every package of the bundle is still
// available; on a line the bundle must also end before position n, on a circle it
// wraps mod n and may not exceed n packages.
PickupTrace simulate(int n, double lambda, const BundlePmf& pmf, double horizon,
                     std::uint64_t seed, Topology topology);

inline PickupTrace simulate_circle(int n, double lambda, const BundlePmf& pmf, double horizon,
                                   std::uint64_t seed) {
  return simulate(n, lambda, pmf, horizon, seed, Topology::Circle);
}

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int reps = 0;
};

// Mean pickups at the horizon over `reps` replications; replication r uses
// derive_seed(seed, r). The result does not depend on `threads`.
McEstimate mc_expected_pickups(int n, double lambda, const BundlePmf& pmf, double horizon,
                               int reps, std::uint64_t seed,
                               Topology topology = Topology::Circle, int threads = 1);

// Fraction of replications in which each position was picked up.
Eigen::VectorXd mc_pickup_frequencies(int n, double lambda, const BundlePmf& pmf, double horizon,
                                      int reps, std::uint64_t seed,
                                      Topology topology = Topology::Circle);

// Destinations (in tour order) of the packages left at the horizon.
Points leftover_destinations(const PickupTrace& trace, const Instance& inst);

struct SpotCheck {
  int n = 0;
  double exact = 0.0;
  McEstimate mc;
  double z_score = 0.0;
  bool ok = false;
};

// Compares the circle formula against simulation at n_max/4, n_max/2 and n_max.
// A check passes when |mc - exact| <= z_limit * stderr.
std::vector<SpotCheck> spot_validate(const GammaTable& tab, double lambda, double t, int reps,
                                     std::uint64_t seed, double z_limit = 3.0, int threads = 1);

}  // namespace dsp
