#include "dsp/bundle.hpp"

#include "dsp/error.hpp"

#include <cmath>
#include <string>

namespace dsp {

namespace {

constexpr double kSumTolerance = 1e-12;

}  // namespace

BundlePmf::BundlePmf(Eigen::VectorXd probs) : probs_(std::move(probs)) {
  const int m = this->m();
  cdf_.resize(m);
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    acc += probs_[k];
    cdf_[k] = acc;
  }
  cdf_[m - 1] = 1.0;

  mean_ = 0.0;
  for (int k = 1; k <= m; ++k) mean_ += k * probs_[k - 1];

  phi_coef_ = Eigen::VectorXd::Zero(m);
  for (int i = 1; i < m; ++i) phi_coef_[i] = (1.0 - cdf_[i - 1]) / i;
}

BundlePmf BundlePmf::from_weights(std::span<const double> weights) {
  int last = -1;
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const double w = weights[k];
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidArgument("bundle weight at size " + std::to_string(k + 1) +
                            " must be finite and nonnegative");
    }
    if (w > 0.0) last = static_cast<int>(k);
    total += w;
  }
  if (last < 0) throw InvalidArgument("bundle weights must contain a positive entry");

  Eigen::VectorXd probs(last + 1);
  for (int k = 0; k <= last; ++k) probs[k] = weights[k] / total;
  // Renormalize once more so the stored sum is 1 to within rounding.
  probs /= probs.sum();
  if (std::abs(probs.sum() - 1.0) > kSumTolerance) {
    throw InvalidArgument("bundle weights could not be normalized");
  }
  return BundlePmf(std::move(probs));
}

BundlePmf BundlePmf::truncated_poisson(double mean, int max_size) {
  if (!(mean > 0.0) || max_size < 1) {
    throw InvalidArgument("truncated Poisson needs mean > 0 and max >= 1");
  }
  std::vector<double> w(max_size);
  // log-space keeps large means from overflowing mean^k / k!.
  for (int k = 1; k <= max_size; ++k) {
    w[k - 1] = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
  }
  return from_weights(w);
}

BundlePmf BundlePmf::deterministic(int m) {
  if (m < 1) throw InvalidArgument("deterministic bundle size must be >= 1");
  std::vector<double> w(m, 0.0);
  w[m - 1] = 1.0;
  return from_weights(w);
}

BundlePmf BundlePmf::uniform(int lo, int hi) {
  if (lo < 1 || hi < lo) throw InvalidArgument("uniform bundle range needs 1 <= lo <= hi");
  std::vector<double> w(hi, 0.0);
  for (int k = lo; k <= hi; ++k) w[k - 1] = 1.0;
  return from_weights(w);
}

double BundlePmf::cdf(int k) const {
  if (k < 1) return 0.0;
  if (k >= m()) return 1.0;
  return cdf_[k - 1];
}

std::uint64_t BundlePmf::hash() const {
  // FNV-1a over the raw bytes of m and the probabilities.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const int m = this->m();
  mix(&m, sizeof m);
  for (int k = 0; k < m; ++k) {
    double p = probs_[k];
    mix(&p, sizeof p);
  }
  return h;
}

BundlePmf make_pmf(std::span<const double> weights) { return BundlePmf::from_weights(weights); }

}  // namespace dsp
