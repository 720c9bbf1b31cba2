#pragma once

#include "dsp/bundle.hpp"
#include "dsp/exact.hpp"

namespace dsp {

inline constexpr double kDefaultQuadTol = 1e-10;
// lambda * t at which "t = infinity" queries are evaluated; exp(-40) is below every
// tolerance used here.
inline constexpr double kInfiniteHorizonLambdaT = 40.0;

struct AlphaQuery {
  double t = 0.0;
  double lambda = 1.0;
  double quad_tol = kDefaultQuadTol;
};

struct AlphaResult {
  double alpha = 0.0;
  double quad_error_estimate = 0.0;
};

// Integrand kernel of the limiting-proportion formula:
//   q(s, v) = 2 v^{m-phi'(1)-1} (1-v) sum_{i<m} R(s,i)
//           - 2 (1-v)^2 sum_{i<m} R(s,i) sum_{j=m-i}^{m-1} ccdf(j) v^{i+j-phi'(1)-1}
// with R the line remainder at rate lambda. Needs tab.n_max() >= m-1 (when m > 1).
// Throws DomainError unless 0 <= v <= 1 and s >= 0.
double q_hat(double s, double v, double lambda, const GammaTable& tab);

// Limiting fraction alpha(t, lambda) = lim K(t,n)/n = lim C(t,n)/n, by adaptive
// quadrature. lambda t is clamped at kInfiniteHorizonLambdaT, so t may be infinite.
// Throws DomainError for lambda <= 0 or t < 0 and QuadratureError if the tolerance is
// not reached.
AlphaResult alpha(const AlphaQuery& q, const GammaTable& tab);

// Closed form for a point-mass bundle size m >= 2 at t = infinity:
//   m exp(-2 H_{m-1}) int_0^1 exp(2 sum_{j<m} u^j / j) du.
AlphaResult alpha_pinsky(int m, double quad_tol = kDefaultQuadTol);

// n * |C(t,n)/n - alpha(t)|. Requires n >= m and n <= tab.n_max().
double convergence_gap(double t, double lambda, int n, const GammaTable& tab,
                       double quad_tol = kDefaultQuadTol);

}  // namespace dsp
