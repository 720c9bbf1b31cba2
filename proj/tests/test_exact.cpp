#include "doctest.h"
#include "oracles.hpp"

#include "dsp/error.hpp"
#include "dsp/exact.hpp"

#include <cmath>
#include <thread>
#include <vector>

using namespace dsp;

namespace {

std::vector<double> weights(const BundlePmf& pmf) {
  return {pmf.probs().data(), pmf.probs().data() + pmf.m()};
}

std::vector<BundlePmf> test_pmfs() {
  return {BundlePmf::deterministic(1), BundlePmf::deterministic(2), BundlePmf::deterministic(3),
          BundlePmf::uniform(1, 3), BundlePmf::uniform(2, 4), BundlePmf::truncated_poisson(10.0, 20),
          make_pmf(std::vector<double>{0.3, 0.0, 0.7})};
}

}  // namespace

TEST_SUITE("exact") {
  TEST_CASE("hand-unrolled coefficients for pairs") {
    const auto tab = build_gamma(BundlePmf::deterministic(2), 3);
    CHECK(tab.gamma(1, 1) == 1.0);
    CHECK(tab.gamma(2, 1) == doctest::Approx(0.0));
    CHECK(tab.gamma(2, 2) == doctest::Approx(2.0));
    CHECK(tab.gamma(3, 1) == doctest::Approx(1.0));
    CHECK(tab.gamma(3, 2) == doctest::Approx(0.0));
    CHECK(tab.gamma(3, 3) == doctest::Approx(2.0));
    CHECK(tab.gamma_tilde(2, 1) == doctest::Approx(0.0));
    CHECK(tab.gamma_tilde(2, 2) == doctest::Approx(2.0));
  }

  TEST_CASE("boundary coefficients when F(n) = 0") {
    const auto tab = build_gamma(BundlePmf::uniform(3, 5), 6);
    for (int n = 1; n <= 2; ++n) {
      for (int i = 1; i <= n; ++i) CHECK(tab.gamma(n, i) == 1.0);
    }
  }

  TEST_CASE("row sums equal n") {
    for (const auto& pmf : test_pmfs()) {
      const int n_max = 200;
      const auto tab = build_gamma(pmf, n_max);
      for (int n = 1; n <= n_max; ++n) {
        double row = 0.0;
        double row_tilde = 0.0;
        for (int i = 1; i <= n; ++i) {
          row += tab.gamma(n, i);
          row_tilde += tab.gamma_tilde(n, i);
        }
        CHECK(std::abs(row - n) <= 1e-9 * n);
        if (n >= pmf.m()) CHECK(std::abs(row_tilde - n) <= 1e-9 * n);
      }
    }
  }

  TEST_CASE("closed forms for point-mass pairs") {
    const auto tab = build_gamma(BundlePmf::deterministic(2), 3);
    for (double t : {0.0, 0.3, 1.0, 2.5}) {
      CHECK(expected_remaining_line({t, 1, 1.0}, tab) == 1.0);
      CHECK(expected_remaining_line({t, 2, 1.0}, tab) == doctest::Approx(2.0 * std::exp(-t)));
      CHECK(expected_remaining_line({t, 3, 1.0}, tab) == doctest::Approx(1.0 + 2.0 * std::exp(-2.0 * t)));
      CHECK(expected_pickups_line({t, 2, 0.5}, tab) == doctest::Approx(2.0 * (1.0 - std::exp(-0.5 * t))));
      CHECK(expected_pickups_circle({t, 2, 1.0}, tab) == doctest::Approx(2.0 * (1.0 - std::exp(-2.0 * t))));
    }
    CHECK(expected_remaining_line({1.0, 3, 1.0}, tab) == doctest::Approx(1.27067).epsilon(1e-5));
  }

  TEST_CASE("single-package bundles decouple") {
    const auto tab = build_gamma(BundlePmf::deterministic(1), 50);
    for (int n : {1, 7, 50}) {
      CHECK(expected_pickups_circle({1.3, n, 0.7}, tab) == doctest::Approx(n * (1.0 - std::exp(-0.91))));
      CHECK(expected_pickups_line({1.3, n, 0.7}, tab) == doctest::Approx(n * (1.0 - std::exp(-0.91))));
    }
  }

  TEST_CASE("line and circle agree with the availability Markov chain") {
    for (const auto& pmf : test_pmfs()) {
      const auto w = weights(pmf);
      const auto tab = build_gamma(pmf, 8);
      for (int n : {1, 2, 3, 5, 8}) {
        for (double t : {0.4, 1.5}) {
          CAPTURE(pmf.m());
          CAPTURE(n);
          CAPTURE(t);
          const double line = oracle::markov_picked(n, w, 0.8, t, false);
          const double circle = oracle::markov_picked(n, w, 0.8, t, true);
          CHECK(expected_pickups_line({t, n, 0.8}, tab) == doctest::Approx(line).epsilon(1e-9));
          CHECK(expected_pickups_circle({t, n, 0.8}, tab) == doctest::Approx(circle).epsilon(1e-9));
        }
      }
    }
  }

  TEST_CASE("line remainder agrees with an RK4 solution of the ODE") {
    for (const auto& pmf : test_pmfs()) {
      const auto tab = build_gamma(pmf, 25);
      const auto R = oracle::rk4_line_remaining(25, weights(pmf), 0.5, 2.0, 4000);
      for (int n = 1; n <= 25; ++n) {
        CHECK(expected_remaining_line({2.0, n, 0.5}, tab) == doctest::Approx(R[n - 1]).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("ODE residual is small and second order in h") {
    const auto det2 = build_gamma(BundlePmf::deterministic(2), 3);
    CHECK(ode_residual({1.0, 3, 1.0}, det2, 1e-4) <= 1e-6);
    const auto tp = build_gamma(BundlePmf::truncated_poisson(10.0, 20), 25);
    CHECK(ode_residual({2.0, 25, 0.5}, tp, 1e-4) <= 1e-5);
    const auto late = build_gamma(BundlePmf::uniform(3, 4), 6);
    CHECK(ode_residual({1.0, 2, 1.0}, late, 1e-4) == 0.0);

    const double r1 = ode_residual({1.0, 12, 1.0}, tp, 4e-2);
    const double r2 = ode_residual({1.0, 12, 1.0}, tp, 2e-2);
    CHECK(std::log2(r1 / r2) >= 1.8);
    CHECK_THROWS_AS(ode_residual({1e-5, 3, 1.0}, det2, 1e-4), DomainError);
  }

  TEST_CASE("boundary values and ranges") {
    for (const auto& pmf : test_pmfs()) {
      const auto tab = build_gamma(pmf, 60);
      for (int n = 1; n <= 60; n += 7) {
        CHECK(expected_remaining_line({0.0, n, 1.0}, tab) == doctest::Approx(n));
        CHECK(expected_pickups_line({0.0, n, 1.0}, tab) == doctest::Approx(0.0).scale(n));
        CHECK(expected_pickups_circle({0.0, n, 1.0}, tab) == doctest::Approx(0.0).scale(n));
        double prev = n + 1e-9;
        for (double t = 0.0; t <= 10.0; t += 0.25) {
          const double r = expected_remaining_line({t, n, 1.0}, tab);
          CHECK(r <= prev + 1e-9);
          prev = r;
          const double k = expected_pickups_line({t, n, 1.0}, tab);
          const double c = expected_pickups_circle({t, n, 1.0}, tab);
          CHECK(k >= -1e-9);
          CHECK(k <= n + 1e-9);
          CHECK(c >= -1e-9);
          CHECK(c <= n + 1e-9);
        }
      }
    }
  }

  TEST_CASE("shifted line pickups are monotone in n") {
    for (const auto& pmf : test_pmfs()) {
      const int m = pmf.m();
      const double mu = pmf.mean();
      const auto tab = build_gamma(pmf, 300);
      for (double t : {0.5, 2.0, 8.0}) {
        double prev = -INFINITY;
        for (int n = m; n <= 300; ++n) {
          const double v = expected_pickups_line({t, n, 1.0}, tab) + n * (m + 1.0) / (m - mu + 1.0);
          CHECK(v - prev >= -1e-9);
          prev = v;
        }
      }
    }
  }

  TEST_CASE("coefficients stay finite and bounded up to the cap") {
    const auto tab = build_gamma(BundlePmf::truncated_poisson(10.0, 20), kDefaultGammaCap);
    CHECK(tab.gamma_packed().allFinite());
    CHECK(tab.gamma_tilde_packed().allFinite());
    CHECK(tab.gamma_packed().cwiseAbs().maxCoeff() < 1e4);
    const double c = expected_pickups_circle({8.0, 2000, 0.075}, tab);
    CHECK(c > 0.0);
    CHECK(c < 2000.0);
  }

  TEST_CASE("errors") {
    const auto pmf = BundlePmf::deterministic(2);
    CHECK_THROWS_AS(build_gamma(pmf, 0), InvalidArgument);
    CHECK_THROWS_AS(build_gamma(pmf, 2001), CapExceeded);
    CHECK_THROWS_AS(build_gamma(pmf, 30, 20), CapExceeded);
    const auto tab = build_gamma(pmf, 10);
    CHECK_THROWS_AS(expected_remaining_line({1.0, 11, 1.0}, tab), CapExceeded);
    CHECK_THROWS_AS(expected_remaining_line({-1.0, 3, 1.0}, tab), DomainError);
    CHECK_THROWS_AS(expected_remaining_line({1.0, 0, 1.0}, tab), DomainError);
    CHECK_THROWS_AS(expected_pickups_circle({1.0, 3, -1.0}, tab), DomainError);
    try {
      build_gamma(pmf, 5000);
    } catch (const CapExceeded& e) {
      CHECK(e.requested() == 5000);
      CHECK(e.cap() == 2000);
    }
  }

  TEST_CASE("cache reuses tables across threads") {
    GammaCache cache;
    const auto pmf = BundlePmf::uniform(1, 3);
    const auto big = cache.get(pmf, 100);
    CHECK(cache.get(pmf, 50) == big);
    CHECK(cache.get(make_pmf(std::vector<double>{1, 1, 1}), 80) == big);
    CHECK(cache.size() == 1);
    const auto bigger = cache.get(pmf, 150);
    CHECK(bigger->n_max() == 150);
    CHECK(cache.get(pmf, 120) == bigger);

    std::vector<std::shared_ptr<const GammaTable>> got(4);
    std::vector<std::thread> th;
    for (int k = 0; k < 4; ++k) th.emplace_back([&, k] { got[k] = cache.get(BundlePmf::deterministic(3), 64); });
    for (auto& t : th) t.join();
    for (int k = 1; k < 4; ++k) CHECK(got[k] == got[0]);
    CHECK_THROWS_AS(cache.get(pmf, 3000), CapExceeded);
  }
}
