#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace dsp {

// Distribution of the number of packages a driver asks for, supported on {1..m}.
// Immutable once built; f(m) > 0 always holds so m is the true support maximum.
class BundlePmf {
 public:
  // Normalizes the weights (weights[k-1] is the weight of size k) and trims trailing
  // zeros. Throws InvalidArgument on negative, non-finite or all-zero weights.
  static BundlePmf from_weights(std::span<const double> weights);

  // Poisson(mean) conditioned on {1..max_size}.
  static BundlePmf truncated_poisson(double mean, int max_size);
  // Point mass at m.
  static BundlePmf deterministic(int m);
  // Uniform on {lo..hi}, 1 <= lo <= hi.
  static BundlePmf uniform(int lo, int hi);

  int m() const { return static_cast<int>(probs_.size()); }

  // P(B = k); zero outside {1..m}.
  double f(int k) const { return (k >= 1 && k <= m()) ? probs_[k - 1] : 0.0; }
  // P(B <= k); 0 below the support, 1 from m on.
  double cdf(int k) const;
  double ccdf(int k) const { return 1.0 - cdf(k); }
  double mean() const { return mean_; }

  // probs()[k-1] == f(k).
  const Eigen::VectorXd& probs() const { return probs_; }

  // Stable 64-bit fingerprint of the probabilities; used as a cache key.
  std::uint64_t hash() const;

  // Coefficients c_i = ccdf(i)/i for i = 1..m-1 of the series phi(y) = sum c_i y^i.
  // Index 0 holds the (zero) constant term.
  const Eigen::VectorXd& phi_coefficients() const { return phi_coef_; }

  bool operator==(const BundlePmf& other) const { return probs_ == other.probs_; }

 private:
  explicit BundlePmf(Eigen::VectorXd probs);

  Eigen::VectorXd probs_;
  Eigen::VectorXd cdf_;
  Eigen::VectorXd phi_coef_;
  double mean_ = 0.0;
};

// Equivalent free-function spellings.
BundlePmf make_pmf(std::span<const double> weights);
inline BundlePmf make_pmf(const std::vector<double>& weights) {
  return make_pmf(std::span<const double>(weights));
}
inline double cdf(const BundlePmf& pmf, int k) { return pmf.cdf(k); }
inline double ccdf(const BundlePmf& pmf, int k) { return pmf.ccdf(k); }
inline double mean(const BundlePmf& pmf) { return pmf.mean(); }

// phi(y) = sum_{i=1}^{m-1} ccdf(i)/i * y^i, evaluated in Horner form.
template <typename Scalar>
Scalar phi(const BundlePmf& pmf, Scalar y) {
  const auto& c = pmf.phi_coefficients();
  Scalar acc(0);
  for (Eigen::Index i = c.size() - 1; i >= 1; --i) acc = (acc + Scalar(c[i])) * y;
  return acc;
}

template <typename Scalar>
Scalar phi_prime(const BundlePmf& pmf, Scalar y) {
  const auto& c = pmf.phi_coefficients();
  Scalar acc(0);
  for (Eigen::Index i = c.size() - 1; i >= 1; --i) {
    acc = acc * y + Scalar(static_cast<double>(i) * c[i]);
  }
  return acc;
}

template <typename Scalar>
Scalar phi_second(const BundlePmf& pmf, Scalar y) {
  const auto& c = pmf.phi_coefficients();
  Scalar acc(0);
  for (Eigen::Index i = c.size() - 1; i >= 2; --i) {
    acc = acc * y + Scalar(static_cast<double>(i * (i - 1)) * c[i]);
  }
  return acc;
}

}  // namespace dsp
