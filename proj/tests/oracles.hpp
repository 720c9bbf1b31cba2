#pragma once

// Independent reference computations used only by the tests. None of them touch
// the coefficient tables or the quadrature of the library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

// Expected packages picked up by time t, from the availability Markov chain on all
// 2^n subsets, by uniformization at rate n*lambda. f[k-1] = P(B = k). n <= 12.
inline double markov_picked(int n, const std::vector<double>& f, double lambda, double t,
                            bool circle) {
  const int states = 1 << n;
  const int full = states - 1;
  const double rate = n * lambda;
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(states);
  pi[full] = 1.0;
  auto step = [&](const Eigen::VectorXd& in) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(states);
    for (int s = 0; s < states; ++s) {
      if (in[s] == 0.0) continue;
      double stay = 1.0;
      for (int loc = 0; loc < n; ++loc) {
        for (int k = 1; k <= static_cast<int>(f.size()); ++k) {
          if (f[k - 1] == 0.0 || k > n) continue;
          if (!circle && loc + k > n) continue;
          int mask = 0;
          for (int j = 0; j < k; ++j) mask |= 1 << ((loc + j) % n);
          if ((s & mask) != mask) continue;
          const double p = f[k - 1] / n;  // one of n uniform locations, then size k
          out[s & ~mask] += in[s] * p;
          stay -= p;
        }
      }
      out[s] += in[s] * stay;
    }
    return out;
  };
  auto picked = [&](const Eigen::VectorXd& dist) {
    double e = 0.0;
    for (int s = 0; s < states; ++s) e += dist[s] * (n - __builtin_popcount(s));
    return e;
  };
  // Poisson(rate t) weights, summed until the remaining tail is negligible.
  const double mean = rate * t;
  double weight = std::exp(-mean);
  double total = weight;
  double result = weight * picked(pi);
  for (int j = 1; total < 1.0 - 1e-15 && j < 100000; ++j) {
    pi = step(pi);
    weight *= mean / j;
    total += weight;
    result += weight * picked(pi);
  }
  return result;
}

// R(t, 1..N) for the line by classical RK4 on the remaining-count ODE
//   dR_n/dt = lambda (-S_n R_n + 2 sum_{i<n} F(n-i) R_i),  R_n(0) = n.
inline Eigen::VectorXd rk4_line_remaining(int N, const std::vector<double>& f, double lambda,
                                          double t, int steps = 20000) {
  std::vector<double> F(N + 1, 0.0);
  double acc = 0.0;
  for (int k = 1; k <= N; ++k) {
    acc += k <= static_cast<int>(f.size()) ? f[k - 1] : 0.0;
    F[k] = std::min(acc, 1.0);
  }
  std::vector<double> S(N + 1, 0.0);
  for (int k = 1; k <= N; ++k) S[k] = S[k - 1] + F[k];
  auto rhs = [&](const Eigen::VectorXd& R) {
    Eigen::VectorXd d(N);
    for (int n = 1; n <= N; ++n) {
      double sum = 0.0;
      for (int i = 1; i < n; ++i) sum += F[n - i] * R[i - 1];
      d[n - 1] = lambda * (-S[n] * R[n - 1] + 2.0 * sum);
    }
    return d;
  };
  Eigen::VectorXd R(N);
  for (int n = 1; n <= N; ++n) R[n - 1] = n;
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) {
    const auto k1 = rhs(R);
    const auto k2 = rhs(R + 0.5 * h * k1);
    const auto k3 = rhs(R + 0.5 * h * k2);
    const auto k4 = rhs(R + h * k3);
    R += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return R;
}

// Dimer deposition on an infinite line: covered fraction 1 - exp(-2 (1 - e^{-x})).
inline double dimer_alpha(double lambda_t) { return 1.0 - std::exp(-2.0 * (1.0 - std::exp(-lambda_t))); }

// Optimal closed tour length by enumerating permutations with point 0 fixed.
template <typename Dist>
double brute_force_tsp(int n, Dist dist) {
  if (n < 2) return 0.0;
  std::vector<int> perm(n - 1);
  std::iota(perm.begin(), perm.end(), 1);
  double best = INFINITY;
  do {
    double len = dist(0, perm.front()) + dist(perm.back(), 0);
    for (std::size_t k = 0; k + 1 < perm.size(); ++k) len += dist(perm[k], perm[k + 1]);
    best = std::min(best, len);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Poisson(mean) weights on 1..max, normalized.
inline std::vector<double> tpois(double mean, int max) {
  std::vector<double> w(max);
  double p = std::exp(-mean);
  for (int k = 1; k <= max; ++k) {
    p *= mean / k;
    w[k - 1] = p;
  }
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  return w;
}

}  // namespace oracle
