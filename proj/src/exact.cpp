#include "dsp/exact.hpp"

#include "dsp/detail/summation.hpp"
#include "dsp/error.hpp"

#include <cassert>
#include <cmath>
#include <string>
#include <vector>

namespace dsp {

GammaTable::GammaTable(BundlePmf pmf, int n_max) : pmf_(std::move(pmf)), n_max_(n_max) {
  const int m = pmf_.m();
  const std::size_t packed = static_cast<std::size_t>(n_max) * (n_max + 1) / 2;
  gamma_.resize(static_cast<Eigen::Index>(packed));
  gamma_tilde_.resize(static_cast<Eigen::Index>(packed));

  Eigen::VectorXd cdf(n_max + 1);
  cum_cdf_.resize(n_max + 1);
  cdf[0] = 0.0;
  cum_cdf_[0] = 0.0;
  for (int k = 1; k <= n_max; ++k) {
    cdf[k] = pmf_.cdf(k);
    cum_cdf_[k] = cum_cdf_[k - 1] + cdf[k];
  }

  // tail[i] = sum_{l=i}^{n-m} gamma(l, i); the terms of the recursion with j >= m all
  // carry F(j) = 1, so they collapse to this running column sum.
  std::vector<double> tail(n_max + 1, 0.0);

  for (int n = 1; n <= n_max; ++n) {
    if (n - m >= 1) {
      const int row = n - m;
      for (int i = 1; i <= row; ++i) tail[i] += gamma_[index(row, i)];
    }

    if (cdf[n] == 0.0) {
      for (int i = 1; i <= n; ++i) gamma_[index(n, i)] = 1.0;
      continue;
    }

    detail::CompensatedSum row_sum;
    for (int i = 1; i < n; ++i) {
      const int jmax = n - i;
      double s = 0.0;
      for (int j = 1; j <= std::min(jmax, m - 1); ++j) s += cdf[j] * gamma_[index(n - j, i)];
      if (jmax >= m) s += tail[i];
      const double denom = cum_cdf_[n] - cum_cdf_[i];
      const double g = 2.0 * s / denom;
      gamma_[index(n, i)] = g;
      row_sum += g;
    }
    gamma_[index(n, n)] = n - row_sum.value();
  }

  for (int n = 1; n <= n_max; ++n) {
    const double fn = cdf[n];
    if (fn == 0.0) {
      for (int i = 1; i < n; ++i) gamma_tilde_[index(n, i)] = 0.0;
      gamma_tilde_[index(n, n)] = n;
      continue;
    }
    const double first_rate = n * fn;
    detail::CompensatedSum row_sum;
    for (int i = 1; i < n; ++i) {
      double s = 0.0;
      for (int k = 1; k <= std::min(m, n - i); ++k) s += pmf_.f(k) * gamma_[index(n - k, i)];
      // S_i <= i F(n) < n F(n), so the scale factor is positive.
      const double scale = 1.0 - cum_cdf_[i] / first_rate;
      assert(scale > 0.0);
      const double g = s / fn / scale;
      gamma_tilde_[index(n, i)] = g;
      row_sum += g;
    }
    gamma_tilde_[index(n, n)] = n - row_sum.value();
  }
}

GammaTable build_gamma(const BundlePmf& pmf, int n_max, int cap) {
  if (n_max < 1) throw InvalidArgument("gamma table needs n_max >= 1");
  if (n_max > cap) {
    throw CapExceeded("gamma table n_max " + std::to_string(n_max) + " exceeds stability cap " +
                          std::to_string(cap),
                      n_max, cap);
  }
  return GammaTable(pmf, n_max);
}

namespace {

void check_query(const ExpectationQuery& q, const GammaTable& tab) {
  if (!(q.t >= 0.0) || !(q.lambda >= 0.0) || q.n < 1) {
    throw DomainError("expectation query needs t >= 0, lambda >= 0 and n >= 1");
  }
  if (q.n > tab.n_max()) {
    throw CapExceeded("n = " + std::to_string(q.n) + " is beyond the gamma table (n_max = " +
                          std::to_string(tab.n_max()) + ")",
                      q.n, tab.n_max());
  }
}

double remaining_line(double t, int n, double lambda, const GammaTable& tab) {
  if (n <= 0) return 0.0;
  if (tab.cum_cdf(n) == 0.0) return n;
  detail::CompensatedSum acc;
  for (int i = 1; i <= n; ++i) acc += tab.gamma(n, i) * std::exp(-lambda * tab.cum_cdf(i) * t);
  return acc.value();
}

}  // namespace

double expected_remaining_line(const ExpectationQuery& q, const GammaTable& tab) {
  check_query(q, tab);
  return remaining_line(q.t, q.n, q.lambda, tab);
}

double expected_pickups_line(const ExpectationQuery& q, const GammaTable& tab) {
  return q.n - expected_remaining_line(q, tab);
}

double expected_pickups_circle(const ExpectationQuery& q, const GammaTable& tab) {
  check_query(q, tab);
  const int n = q.n;
  const double fn = tab.pmf().cdf(n);
  detail::CompensatedSum remaining;
  for (int i = 1; i < n; ++i) {
    remaining += tab.gamma_tilde(n, i) * std::exp(-q.lambda * tab.cum_cdf(i) * q.t);
  }
  remaining += tab.gamma_tilde(n, n) * std::exp(-q.lambda * n * fn * q.t);
  return n - remaining.value();
}

double ode_residual(const ExpectationQuery& q, const GammaTable& tab, double h) {
  check_query(q, tab);
  if (!(h > 0.0) || !(q.t > h)) throw DomainError("ode residual needs t > h > 0");
  const int n = q.n;
  const auto& pmf = tab.pmf();

  const double derivative =
      (remaining_line(q.t + h, n, q.lambda, tab) - remaining_line(q.t - h, n, q.lambda, tab)) /
      (2.0 * h);

  detail::CompensatedSum rhs;
  rhs += -tab.cum_cdf(n) * remaining_line(q.t, n, q.lambda, tab);
  for (int i = 1; i < n; ++i) rhs += 2.0 * pmf.cdf(n - i) * remaining_line(q.t, i, q.lambda, tab);
  return std::abs(derivative - q.lambda * rhs.value());
}

std::shared_ptr<const GammaTable> GammaCache::get(const BundlePmf& pmf, int n_max) {
  std::lock_guard lock(mutex_);
  const auto key = pmf.hash();
  auto [lo, hi] = tables_.equal_range(key);
  for (auto it = lo; it != hi; ++it) {
    if (it->second->pmf() == pmf && it->second->n_max() >= n_max) return it->second;
  }
  auto table = std::make_shared<const GammaTable>(build_gamma(pmf, n_max, cap_));
  tables_.emplace(key, table);
  return table;
}

std::size_t GammaCache::size() const {
  std::lock_guard lock(mutex_);
  return tables_.size();
}

}  // namespace dsp
