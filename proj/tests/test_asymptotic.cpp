#include "doctest.h"
#include "oracles.hpp"

#include "dsp/asymptotic.hpp"
#include "dsp/error.hpp"
#include "dsp/quadrature.hpp"

#include <cmath>

using namespace dsp;

namespace {

GammaTable small_table(const BundlePmf& pmf) { return build_gamma(pmf, std::max(1, pmf.m() - 1)); }

}  // namespace

TEST_SUITE("asymptotic") {
  TEST_CASE("kernel special cases") {
    const auto det2 = small_table(BundlePmf::deterministic(2));
    for (double v : {0.0, 0.2, 0.7}) CHECK(q_hat(50.0, v, 1.0, det2) == doctest::Approx(2.0 * v * (1.0 - v)));
    const auto tp = small_table(BundlePmf::truncated_poisson(10.0, 20));
    CHECK(q_hat(0.3, 1.0, 1.0, tp) == 0.0);
    const auto one = small_table(BundlePmf::deterministic(1));
    CHECK(q_hat(0.3, 0.4, 1.0, one) == 0.0);
    CHECK_THROWS_AS(q_hat(-0.1, 0.5, 1.0, tp), DomainError);
    CHECK_THROWS_AS(q_hat(0.1, 1.5, 1.0, tp), DomainError);
  }

  TEST_CASE("pairs match the dimer deposition closed form at finite t") {
    const auto tab = small_table(BundlePmf::deterministic(2));
    for (double lt : {0.1, 0.5, 1.0, 2.0, 5.0, 30.0}) {
      for (double lambda : {0.5, 2.0}) {
        CAPTURE(lt);
        CHECK(alpha({lt / lambda, lambda}, tab).alpha == doctest::Approx(oracle::dimer_alpha(lt)).epsilon(1e-8));
      }
    }
    CHECK(alpha({30.0, 1.0}, tab).alpha == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-3));
  }

  TEST_CASE("t = 0, t = infinity and singletons") {
    const auto tp = small_table(BundlePmf::truncated_poisson(10.0, 20));
    CHECK(alpha({0.0, 1.0}, tp).alpha == 0.0);
    const auto inf = alpha({INFINITY, 1.0}, tp).alpha;
    CHECK(inf == doctest::Approx(alpha({40.0, 1.0}, tp).alpha).epsilon(1e-12));
    const auto u13 = small_table(BundlePmf::uniform(1, 3));
    CHECK(alpha({40.0, 1.0}, u13).alpha >= 0.999);
    const auto one = small_table(BundlePmf::deterministic(1));
    CHECK(alpha({1.3, 0.7}, one).alpha == doctest::Approx(1.0 - std::exp(-0.91)));
    CHECK_THROWS_AS(alpha({1.0, 0.0}, tp), DomainError);
    CHECK_THROWS_AS(alpha({-1.0, 1.0}, tp), DomainError);
  }

  TEST_CASE("point-mass closed form") {
    CHECK(alpha_pinsky(2).alpha == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-10));
    double prev = 1.0;
    for (int m = 2; m <= 10; ++m) {
      const double a = alpha_pinsky(m).alpha;
      CHECK(a < prev);
      prev = a;
      if (m == 2 || m == 3 || m == 5) {
        const auto tab = small_table(BundlePmf::deterministic(m));
        CHECK(std::abs(alpha({40.0, 1.0}, tab).alpha - a) <= 1e-4);
      }
    }
    CHECK_THROWS_AS(alpha_pinsky(1), DomainError);
  }

  TEST_CASE("alpha is the limit of C/n") {
    // Richardson extrapolation of the exact circle counts: C/n = alpha + c/n + o(1/n).
    for (const auto& pmf : {BundlePmf::deterministic(3), BundlePmf::uniform(1, 3),
                            BundlePmf::truncated_poisson(10.0, 20)}) {
      const auto tab = build_gamma(pmf, 1600);
      for (double t : {0.5, 2.0}) {
        const double c800 = expected_pickups_circle({t, 800, 1.0}, tab) / 800;
        const double c1600 = expected_pickups_circle({t, 1600, 1.0}, tab) / 1600;
        CHECK(alpha({t, 1.0}, tab).alpha == doctest::Approx(2.0 * c1600 - c800).epsilon(1e-5));
      }
    }
  }

  TEST_CASE("alpha lies in [0,1] and grows with t and lambda") {
    for (const auto& pmf : {BundlePmf::deterministic(4), BundlePmf::uniform(2, 4),
                            BundlePmf::truncated_poisson(10.0, 20)}) {
      const auto tab = small_table(pmf);
      double prev_t = 0.0;
      for (double t = 0.25; t <= 8.0; t += 0.25) {
        const double a = alpha({t, 0.5}, tab).alpha;
        CHECK(a >= prev_t - 1e-10);
        CHECK(a <= 1.0);
        prev_t = a;
      }
      double prev_l = 0.0;
      for (double lambda = 0.05; lambda <= 3.0; lambda += 0.15) {
        const double a = alpha({1.0, lambda}, tab).alpha;
        CHECK(a >= prev_l - 1e-10);
        prev_l = a;
      }
    }
  }

  TEST_CASE("convergence gap") {
    const auto tab = build_gamma(BundlePmf::deterministic(1), 100);
    CHECK(convergence_gap(1.0, 1.0, 50, tab) == doctest::Approx(0.0).scale(1.0));
    const auto det2 = build_gamma(BundlePmf::deterministic(2), 400);
    CHECK(convergence_gap(0.0, 1.0, 100, det2) == 0.0);
    for (int n : {50, 100, 200, 400}) CHECK(convergence_gap(1.0, 1.0, n, det2) < 1.0);
    CHECK_THROWS_AS(convergence_gap(1.0, 1.0, 1, det2), DomainError);
  }
}

TEST_SUITE("quadrature") {
  TEST_CASE("adaptive Simpson on smooth integrands") {
    auto cubic = adaptive_simpson([](double x) { return x * x * x - 2 * x; }, 0.0, 2.0, 1e-12);
    CHECK(cubic.value == doctest::Approx(0.0).scale(1.0));
    auto e = adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12);
    CHECK(e.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    CHECK(e.error_estimate <= 1e-10);
    auto peak = adaptive_simpson([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-9);
    CHECK(peak.value == doctest::Approx(2.0 * std::atan(1.0 / 1e-2) / 1e-2).epsilon(1e-8));
    auto f = adaptive_simpson([](float x) { return x * x; }, 0.0f, 3.0f, 1e-5f);
    CHECK(f.value == doctest::Approx(9.0).epsilon(1e-5));
  }

  TEST_CASE("failure carries the best estimate") {
    try {
      adaptive_simpson([](double x) { return std::sin(1.0 / (x + 1e-12)); }, 0.0, 1.0, 1e-14, 6);
      FAIL("expected QuadratureError");
    } catch (const QuadratureError& err) {
      CHECK(std::isfinite(err.estimate()));
      CHECK(err.error_estimate() > 0.0);
    }
  }
}
