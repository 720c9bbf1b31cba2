#include "dsp/asymptotic.hpp"

#include "dsp/error.hpp"
#include "dsp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dsp {

namespace {

constexpr int kPanels = 16;

// v^e for v in [0,1] and e >= 0, with 0^0 = 1.
double unit_pow(double v, double e) {
  if (v == 0.0) return e > 0.0 ? 0.0 : 1.0;
  return std::exp(e * std::log(v));
}

double line_remainder(double s, int n, double lambda, const GammaTable& tab) {
  return expected_remaining_line({s, n, lambda}, tab);
}

template <typename Func>
QuadratureResult<double> integrate_panels(const Func& f, double a, double b, double tol) {
  QuadratureResult<double> total;
  const double width = (b - a) / kPanels;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + p * width;
    const double hi = (p + 1 == kPanels) ? b : a + (p + 1) * width;
    const auto part = adaptive_simpson<double>(f, lo, hi, tol / kPanels);
    total.value += part.value;
    total.error_estimate += part.error_estimate;
  }
  return total;
}

}  // namespace

double q_hat(double s, double v, double lambda, const GammaTable& tab) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("q_hat needs v in [0, 1]");
  if (!(s >= 0.0)) throw DomainError("q_hat needs s >= 0");
  const auto& pmf = tab.pmf();
  const int m = pmf.m();
  if (m == 1) return 0.0;
  if (tab.n_max() < m - 1) {
    throw CapExceeded("q_hat needs the gamma table to cover n = m - 1", m - 1, tab.n_max());
  }

  const double dphi1 = pmf.mean() - 1.0;
  const double w = 1.0 - v;

  std::vector<double> rem(m);
  double rem_total = 0.0;
  for (int i = 1; i < m; ++i) {
    rem[i] = line_remainder(s, i, lambda, tab);
    rem_total += rem[i];
  }

  const double lead = 2.0 * unit_pow(v, std::max(0.0, m - dphi1 - 1.0)) * w * rem_total;

  double cross = 0.0;
  for (int i = 1; i < m; ++i) {
    double inner = 0.0;
    for (int j = m - i; j < m; ++j) {
      inner += pmf.ccdf(j) * unit_pow(v, std::max(0.0, i + j - dphi1 - 1.0));
    }
    cross += rem[i] * inner;
  }
  return lead - 2.0 * w * w * cross;
}

AlphaResult alpha(const AlphaQuery& q, const GammaTable& tab) {
  if (!(q.lambda > 0.0)) throw DomainError("alpha needs lambda > 0");
  if (!(q.t >= 0.0)) throw DomainError("alpha needs t >= 0");
  if (!(q.quad_tol > 0.0)) throw DomainError("alpha needs a positive quadrature tolerance");
  if (q.t == 0.0) return {0.0, 0.0};
  // Beyond lambda t = 40 the integrand mass sits below exp(-lambda t), which
  // underflows; the clamped value agrees with the limit to far below quad_tol.
  const double t = std::min(q.t, kInfiniteHorizonLambdaT / q.lambda);

  const auto& pmf = tab.pmf();
  const int m = pmf.m();
  const double dphi1 = pmf.mean() - 1.0;
  const double phi1 = phi(pmf, 1.0);
  const double lower = std::exp(-q.lambda * t);

  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double s = std::max(0.0, t + std::log(u) / q.lambda);
    return std::exp(2.0 * (phi(pmf, u) - phi1)) * q_hat(s, std::min(u, 1.0), q.lambda, tab);
  };

  QuadratureResult<double> integral{0.0, 0.0};
  if (m > 1) integral = integrate_panels(integrand, lower, 1.0, q.quad_tol);

  const double boundary = (m - (m - 1) * lower) *
                          std::exp(2.0 * (phi(pmf, lower) - phi1) - q.lambda * t * (m - dphi1));
  return {1.0 - integral.value - boundary, integral.error_estimate};
}

AlphaResult alpha_pinsky(int m, double quad_tol) {
  if (m < 2) throw DomainError("the point-mass closed form needs m >= 2");
  double harmonic = 0.0;
  for (int j = 1; j < m; ++j) harmonic += 1.0 / j;
  auto integrand = [m](double u) {
    double s = 0.0;
    for (int j = m - 1; j >= 1; --j) s = (s + 1.0 / j) * u;
    return std::exp(2.0 * s);
  };
  const auto integral = integrate_panels(integrand, 0.0, 1.0, quad_tol);
  const double scale = m * std::exp(-2.0 * harmonic);
  return {scale * integral.value, scale * integral.error_estimate};
}

double convergence_gap(double t, double lambda, int n, const GammaTable& tab, double quad_tol) {
  if (n < tab.pmf().m()) throw DomainError("convergence gap needs n >= m");
  const double c = expected_pickups_circle({t, n, lambda}, tab);
  if (t == 0.0) return std::abs(c);
  const double a = alpha({t, lambda, quad_tol}, tab).alpha;
  return std::abs(c - n * a);
}

}  // namespace dsp
