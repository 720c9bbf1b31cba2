#pragma once

#include "dsp/bundle.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace dsp {

inline constexpr int kDefaultGammaCap = 2000;

// Exponential-mixture coefficients for the expected number of packages left on a line
// (gamma) and on a circle (gamma_tilde), for every n in 1..n_max. The coefficients do
// not depend on lambda or t; those enter only at evaluation time.
//
//   R_line(t, n)   = sum_{i=1}^{n}   gamma(n,i)       exp(-lambda S_i t)
//   R_circle(t, n) = sum_{i=1}^{n-1} gamma_tilde(n,i) exp(-lambda S_i t)
//                    + gamma_tilde(n,n) exp(-lambda n F(n) t)
//
// with S_i = F(1) + ... + F(i). For n >= m, F(n) = 1 and the circle exponent is lambda n t.
class GammaTable {
 public:
  GammaTable(BundlePmf pmf, int n_max);

  const BundlePmf& pmf() const { return pmf_; }
  int n_max() const { return n_max_; }

  // 1 <= i <= n <= n_max.
  double gamma(int n, int i) const { return gamma_[index(n, i)]; }
  double gamma_tilde(int n, int i) const { return gamma_tilde_[index(n, i)]; }

  // S_i = sum_{j<=i} F(j); cum_cdf(0) == 0.
  double cum_cdf(int i) const { return cum_cdf_[i]; }
  const Eigen::VectorXd& cum_cdf() const { return cum_cdf_; }

  // Packed lower-triangular storage, row n occupies [n(n-1)/2, n(n+1)/2).
  const Eigen::VectorXd& gamma_packed() const { return gamma_; }
  const Eigen::VectorXd& gamma_tilde_packed() const { return gamma_tilde_; }

 private:
  static std::size_t index(int n, int i) {
    return static_cast<std::size_t>(n) * (n - 1) / 2 + static_cast<std::size_t>(i - 1);
  }

  BundlePmf pmf_;
  int n_max_;
  Eigen::VectorXd cum_cdf_;
  Eigen::VectorXd gamma_;
  Eigen::VectorXd gamma_tilde_;
};

struct ExpectationQuery {
  double t = 0.0;       // hours
  int n = 1;            // packages
  double lambda = 0.0;  // requests per location per hour
};

// Throws CapExceeded when n_max > cap, InvalidArgument when n_max < 1.
GammaTable build_gamma(const BundlePmf& pmf, int n_max, int cap = kDefaultGammaCap);

// Expected packages remaining on a line of n at time t. Returns n when F(n) = 0.
double expected_remaining_line(const ExpectationQuery& q, const GammaTable& tab);
// n - expected_remaining_line.
double expected_pickups_line(const ExpectationQuery& q, const GammaTable& tab);
// Expected packages picked up on a circle of n by time t.
double expected_pickups_circle(const ExpectationQuery& q, const GammaTable& tab);

// |central-difference dR/dt - lambda * rhs| where rhs is the right side of the
// recursive ODE for the line remainder. Requires t > h > 0.
double ode_residual(const ExpectationQuery& q, const GammaTable& tab, double h);

// Thread-safe cache of tables keyed by (pmf hash, pmf contents). A cached table with a
// larger n_max satisfies smaller requests.
class GammaCache {
 public:
  explicit GammaCache(int cap = kDefaultGammaCap) : cap_(cap) {}

  std::shared_ptr<const GammaTable> get(const BundlePmf& pmf, int n_max);
  std::size_t size() const;

 private:
  int cap_;
  mutable std::mutex mutex_;
  std::multimap<std::uint64_t, std::shared_ptr<const GammaTable>> tables_;
};

}  // namespace dsp
