#include "dsp/simulator.hpp"

#include "dsp/error.hpp"
#include "dsp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace dsp {

PickupTrace::PickupTrace(int n, double horizon, std::vector<AcceptedBundle> accepted,
                         std::vector<int> leftover)
    : n_(n), horizon_(horizon), accepted_(std::move(accepted)), leftover_(std::move(leftover)) {
  cumulative_.reserve(accepted_.size());
  int total = 0;
  for (const auto& b : accepted_) {
    total += b.size;
    cumulative_.push_back(total);
  }
}

int PickupTrace::picked_count_at(double t) const {
  const auto it = std::upper_bound(accepted_.begin(), accepted_.end(), t,
                                   [](double value, const AcceptedBundle& b) { return value < b.time; });
  const auto k = it - accepted_.begin();
  return k == 0 ? 0 : cumulative_[k - 1];
}

bool PickupTrace::consistent(Topology topology) const {
  std::vector<char> taken(n_, 0);
  double last = -1.0;
  int total = 0;
  for (const auto& b : accepted_) {
    if (!(b.time > last) || b.time > horizon_) return false;
    last = b.time;
    if (b.size < 1 || b.size > n_) return false;
    if (topology == Topology::Line && b.location + b.size > n_) return false;
    for (int j = 0; j < b.size; ++j) {
      const int pos = (b.location + j) % n_;
      if (taken[pos]) return false;
      taken[pos] = 1;
    }
    total += b.size;
  }
  if (total != n_ - static_cast<int>(leftover_.size())) return false;
  for (int pos : leftover_) {
    if (pos < 0 || pos >= n_ || taken[pos]) return false;
  }
  return picked_count_at(horizon_) == total;
}

namespace {

class RequestStream {
 public:
  RequestStream(int n, double lambda, const BundlePmf& pmf, std::uint64_t seed)
      : rng_(seed),
        gap_(n * lambda),
        location_(0, n - 1),
        size_(pmf.probs().data(), pmf.probs().data() + pmf.m()) {}

  double next_gap() { return gap_(rng_); }
  int next_location() { return location_(rng_); }
  int next_size() { return size_(rng_) + 1; }

 private:
  Rng rng_;
  std::exponential_distribution<double> gap_;
  std::uniform_int_distribution<int> location_;
  std::discrete_distribution<int> size_;
};

// Runs one replication; `taken` is scratch space of size n. Records accepted bundles
// when `record` is non-null and returns the number of packages picked up.
int run_replication(int n, double lambda, const BundlePmf& pmf, double horizon, std::uint64_t seed,
                    Topology topology, std::vector<char>& taken,
                    std::vector<AcceptedBundle>* record) {
  std::fill(taken.begin(), taken.end(), 0);
  if (!(lambda > 0.0) || !(horizon > 0.0)) return 0;
  RequestStream stream(n, lambda, pmf, seed);
  int picked = 0;
  double t = 0.0;
  while (picked < n) {
    t += stream.next_gap();
    if (t > horizon) break;
    const int loc = stream.next_location();
    const int k = stream.next_size();
    if (k > n) continue;
    if (topology == Topology::Line && loc + k > n) continue;
    bool free = true;
    for (int j = 0; j < k && free; ++j) {
      int pos = loc + j;
      if (pos >= n) pos -= n;
      free = !taken[pos];
    }
    if (!free) continue;
    for (int j = 0; j < k; ++j) {
      int pos = loc + j;
      if (pos >= n) pos -= n;
      taken[pos] = 1;
    }
    picked += k;
    if (record) record->push_back({t, loc, k});
  }
  return picked;
}

void check_sim_args(int n, double lambda, double horizon) {
  if (n < 1) throw InvalidArgument("simulation needs n >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("simulation needs lambda >= 0");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw InvalidArgument("simulation needs T >= 0");
}

template <typename Body>
void for_each_replication(int reps, int threads, Body body) {
  threads = std::max(1, std::min(threads, reps));
  if (threads == 1) {
    body(0, reps);
    return;
  }
  std::vector<std::thread> workers;
  const int chunk = (reps + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(reps, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back(body, lo, hi);
  }
  for (auto& th : workers) th.join();
}

}  // namespace

PickupTrace simulate(int n, double lambda, const BundlePmf& pmf, double horizon, std::uint64_t seed,
                     Topology topology) {
  check_sim_args(n, lambda, horizon);
  std::vector<char> taken(n);
  std::vector<AcceptedBundle> accepted;
  run_replication(n, lambda, pmf, horizon, seed, topology, taken, &accepted);
  std::vector<int> leftover;
  for (int p = 0; p < n; ++p) {
    if (!taken[p]) leftover.push_back(p);
  }
  return PickupTrace(n, horizon, std::move(accepted), std::move(leftover));
}

McEstimate mc_expected_pickups(int n, double lambda, const BundlePmf& pmf, double horizon, int reps,
                               std::uint64_t seed, Topology topology, int threads) {
  check_sim_args(n, lambda, horizon);
  if (reps < 2) throw InvalidArgument("Monte Carlo estimate needs reps >= 2");
  std::vector<double> counts(reps);
  for_each_replication(reps, threads, [&](int lo, int hi) {
    std::vector<char> taken(n);
    for (int r = lo; r < hi; ++r) {
      counts[r] = run_replication(n, lambda, pmf, horizon, derive_seed(seed, r), topology, taken,
                                  nullptr);
    }
  });
  const Eigen::Map<const Eigen::VectorXd> c(counts.data(), reps);
  McEstimate est;
  est.reps = reps;
  est.mean = c.mean();
  const double var = (c.array() - est.mean).square().sum() / (reps - 1);
  est.std_error = std::sqrt(var / reps);
  return est;
}

Eigen::VectorXd mc_pickup_frequencies(int n, double lambda, const BundlePmf& pmf, double horizon,
                                      int reps, std::uint64_t seed, Topology topology) {
  check_sim_args(n, lambda, horizon);
  if (reps < 1) throw InvalidArgument("pickup frequencies need reps >= 1");
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(n);
  std::vector<char> taken(n);
  for (int r = 0; r < reps; ++r) {
    run_replication(n, lambda, pmf, horizon, derive_seed(seed, r), topology, taken, nullptr);
    for (int p = 0; p < n; ++p) freq[p] += taken[p];
  }
  return freq / reps;
}

Points leftover_destinations(const PickupTrace& trace, const Instance& inst) {
  if (trace.n() != inst.size()) {
    throw InvalidArgument("trace covers " + std::to_string(trace.n()) +
                          " packages but the instance has " + std::to_string(inst.size()));
  }
  const auto& left = trace.leftover();
  Points out(2, static_cast<Eigen::Index>(left.size()));
  for (std::size_t k = 0; k < left.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = inst.at(left[k]);
  return out;
}

std::vector<SpotCheck> spot_validate(const GammaTable& tab, double lambda, double t, int reps,
                                     std::uint64_t seed, double z_limit, int threads) {
  std::vector<SpotCheck> out;
  const int n_max = tab.n_max();
  std::vector<int> sizes{std::max(1, n_max / 4), std::max(1, n_max / 2), n_max};
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    SpotCheck check;
    check.n = sizes[k];
    check.exact = expected_pickups_circle({t, check.n, lambda}, tab);
    check.mc = mc_expected_pickups(check.n, lambda, tab.pmf(), t, reps, derive_seed(seed, k),
                                   Topology::Circle, threads);
    const double diff = std::abs(check.mc.mean - check.exact);
    check.z_score = check.mc.std_error > 0.0 ? diff / check.mc.std_error : (diff == 0.0 ? 0.0 : INFINITY);
    check.ok = check.z_score <= z_limit;
    out.push_back(check);
  }
  return out;
}

}  // namespace dsp
