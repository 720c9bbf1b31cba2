#include "doctest.h"

#include "dsp/error.hpp"
#include "dsp/rng.hpp"
#include "dsp/scenarios.hpp"

#include <cmath>

using namespace dsp;

TEST_SUITE("scenarios") {
  TEST_CASE("uniform square") {
    const auto one = gen_uniform_square(1, 5.0, 3);
    CHECK(one.cols() == 1);
    CHECK(one.minCoeff() >= 0.0);
    CHECK(one.maxCoeff() <= 5.0);
    CHECK(gen_uniform_square(100, 5.0, 9) == gen_uniform_square(100, 5.0, 9));
    CHECK(gen_uniform_square(100, 5.0, 9) != gen_uniform_square(100, 5.0, 10));

    const auto big = gen_uniform_square(100000, 5.0, 1);
    const double mean_l1 = (big.colwise() - Point(2.5, 2.5)).cwiseAbs().colwise().sum().mean();
    CHECK(mean_l1 == doctest::Approx(2.5).epsilon(0.02));
  }

  TEST_CASE("three clusters") {
    const auto pts = gen_three_clusters(4);
    REQUIRE(pts.cols() == 2000);
    const auto counts = three_cluster_counts(2000);
    CHECK(counts == std::vector<int>{500, 700, 500, 300});
    const auto ellipses = three_cluster_ellipses();
    int col = counts[0];
    for (std::size_t e = 0; e < ellipses.size(); ++e) {
      Point sum = Point::Zero();
      for (int j = 0; j < counts[e + 1]; ++j, ++col) {
        CHECK(ellipses[e].contains(pts.col(col)));
        sum += pts.col(col);
      }
      const Point mean = sum / counts[e + 1];
      // Uniform on an ellipse: per-axis variance is semi_axis^2 / 4.
      const Point se = ellipses[e].semi_axes / (2.0 * std::sqrt(double(counts[e + 1])));
      CHECK(std::abs(mean.x() - ellipses[e].center.x()) <= 3.0 * se.x());
      CHECK(std::abs(mean.y() - ellipses[e].center.y()) <= 3.0 * se.y());
    }
    CHECK(three_cluster_counts(1000) == std::vector<int>{250, 350, 250, 150});
    CHECK(gen_three_clusters(4, 1000).cols() == 1000);
  }

  TEST_CASE("defaults") {
    const auto d = default_params();
    CHECK(d.params.zeta_v == 0.550);
    CHECK(d.params.h_p == 16.49);
    CHECK(d.params.van_mile_rate() == doctest::Approx(2.309).epsilon(1e-3));
    CHECK(d.params.tau_v == doctest::Approx(97.0 / 3600.0));
    CHECK(d.params.capacity == 200);
    CHECK(d.model.lambda(0.0) == doctest::Approx(0.03));
    CHECK(d.model.lambda(1.0) == doctest::Approx(0.07));
    CHECK(d.model.lambda(-10.0) == 0.0);
    CHECK(d.pmf == BundlePmf::truncated_poisson(10.0, 20));
  }

  TEST_CASE("scenario plumbing") {
    CHECK(parse_scenario_kind("uniform") == ScenarioKind::UniformSquare);
    CHECK(parse_scenario_kind("clusters") == ScenarioKind::ThreeClusters);
    CHECK_THROWS_AS(parse_scenario_kind("ring"), ConfigError);
    Scenario s;
    CHECK(s.depot_point() == Point(2.5, 2.5));
    s.depot = DepotPlacement::Corner;
    CHECK(s.depot_point() == Point(0.0, 0.0));
    s.n = 0;
    CHECK_THROWS_AS(s.validate(), InvalidArgument);
    CHECK(improvement_pct(70.0, 100.0) == doctest::Approx(30.0));
  }

  TEST_CASE("small case study") {
    Scenario s;
    s.n = 400;
    s.seed = 12;
    CaseStudyConfig cfg;
    const auto rep = run_case_study(s, cfg, 3);
    REQUIRE(rep.outcomes.size() == 3);
    for (const auto& o : rep.outcomes) {
      CHECK(o.improvement_pct == doctest::Approx(100.0 * (o.cost_van_only - o.cost_mixed) / o.cost_van_only));
      CHECK(o.cost_mixed == doctest::Approx(o.payments + o.cost_leftover_vans));
      CHECK(o.leftover_count == o.leftover_points.cols());
      CHECK(o.cvrp_all_len >= o.tsp_len - 1e-9);
    }
    cfg.threads = 3;
    const auto again = run_case_study(s, cfg, 3);
    for (int k = 0; k < 3; ++k) CHECK(again.outcomes[k].cost_mixed == rep.outcomes[k].cost_mixed);
  }

  TEST_CASE("no supply response degenerates to vans alone") {
    Scenario s;
    s.n = 300;
    CaseStudyConfig cfg;
    cfg.defaults.model = {0.0, 0.0};
    const auto rep = run_case_study(s, cfg, 2);
    for (const auto& o : rep.outcomes) {
      CHECK(o.leftover_count == 300);
      CHECK(o.payments == 0.0);
      CHECK(o.improvement_pct <= 0.0);
    }
  }

  TEST_CASE("realized mixed cost is stable across seeds at full size") {
    const auto rep = run_case_study(Scenario{}, CaseStudyConfig{}, 5);
    CHECK(rep.cost_mixed.sd / rep.cost_mixed.mean <= 0.10);
    for (const auto& o : rep.outcomes) {
      CHECK(o.pickups_exact);
      CHECK(o.leftover_count < o.n);
    }
  }
}
