#include <doctest.h>

#include <cmath>
#include <random>

#include "../support.hpp"
#include "relaycap/oracle.hpp"

using namespace relaycap;
using relaycap::testing::random_parallel;

namespace {
const StateEnsemble& single_ac() {
  static const StateEnsemble e({{1.0, 1.0, 1.0, 0.5}});
  return e;
}
}  // namespace

TEST_CASE("parallel grid with one subchannel is exact") {
  const ParallelProblem p{{SubchannelSpec(1.0, 0.5, 2.0)}, 1.5, 0.7};
  const auto r = grid_maxmin_parallel(p, 0.1);
  const double expected = std::min(cap_real((1.5 + 2.0 * 0.7) / 1.0), cap_real(1.5 / 0.5));
  CHECK(r.value == doctest::Approx(expected).epsilon(1e-15));
  CHECK(r.gap == 0.0);
  CHECK(r.evaluations == 1);
}

TEST_CASE("parallel grid splits symmetric subchannels evenly") {
  const ParallelProblem p{{SubchannelSpec(1.0, 0.5, 1.0), SubchannelSpec(1.0, 0.5, 1.0)}, 2.0, 2.0};
  const double res = 0.01;
  const auto r = grid_maxmin_parallel(p, res);
  CHECK(std::abs(r.allocation.p[0] - r.allocation.p[1]) <= 2.0 * res * p.p_budget + 1e-12);
  CHECK(r.allocation.p[0] + r.allocation.p[1] == doctest::Approx(2.0));
  CHECK(r.evaluations == 101 * 101);
}

TEST_CASE("finer grids never lose value") {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 10; ++i) {
    const ParallelProblem p = random_parallel(rng, 2);
    const auto coarse = grid_maxmin_parallel(p, 0.02);
    const auto fine = grid_maxmin_parallel(p, 0.01);
    CHECK(fine.value >= coarse.value);
    CHECK(fine.value <= coarse.value + coarse.gap);
  }
}

TEST_CASE("synchronized grid contains the asynchronized one") {
  std::mt19937_64 rng(62);
  for (int i = 0; i < 6; ++i) {
    const ParallelProblem p = random_parallel(rng, 1 + i % 2);
    const auto sync = grid_sync_parallel(p, 0.05);
    const auto async = grid_maxmin_parallel(p, 0.05);
    CHECK(sync.value >= async.value);
    CHECK(sync.beta.size() == p.subchannels.size());
  }
}

TEST_CASE("fading grid: single A^c state in full duplex") {
  const auto r = grid_maxmin_fading(single_ac(), 1.0, 4.0, FadingModel::kFullDuplexLower, 0.1);
  CHECK(r.value == 1.0);
  CHECK(r.gap == 0.0);
  CHECK(r.allocation.theta.empty());
}

TEST_CASE("fading grid: theta endpoints are on the grid") {
  const StateEnsemble e({{1.0, 1.0, 0.0, 4.0}});
  const auto r = grid_maxmin_fading(e, 1.0, 1.0, FadingModel::kScenarioII, 0.1, 0.01);
  REQUIRE(r.allocation.theta.size() == 1);
  CHECK(r.allocation.theta[0] == 1.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fading grid: Scenario I pins theta") {
  const StateEnsemble e({{0.5, 1.0, 1.0, 2.0}, {0.5, 0.5, 2.0, 0.1}});
  const auto r = grid_maxmin_fading(e, 1.0, 1.0, FadingModel::kScenarioI, 0.05);
  CHECK(r.allocation.theta == std::vector<double>{0.5, 0.5});
}

TEST_CASE("fading grid brackets a known optimum") {
  // Single class-A state (1, 1, 4) at P = P_R = 1: optimum log2(3) at theta = 1/2.
  const StateEnsemble e({{1.0, 1.0, 1.0, 4.0}});
  const double known = std::log2(3.0);
  for (double tr : {1e-2, 1e-3}) {
    const auto r = grid_maxmin_fading(e, 1.0, 1.0, FadingModel::kScenarioII, 0.1, tr);
    CHECK(r.value <= known + 1e-12);
    CHECK(known <= r.value + r.gap);
  }
  const auto coarse = grid_maxmin_fading(e, 1.0, 1.0, FadingModel::kScenarioII, 0.1, 1e-3);
  const auto fine = grid_maxmin_fading(e, 1.0, 1.0, FadingModel::kScenarioII, 0.1, 1e-4);
  CHECK(fine.value >= coarse.value);
  CHECK(fine.value - coarse.value <= coarse.gap);
}

TEST_CASE("upper models dominate lower models on the same grid") {
  const StateEnsemble e({{0.5, 0.3, 1.0, 2.0}, {0.5, 1.0, 0.2, 0.4}});
  auto v = [&](FadingModel m) { return grid_maxmin_fading(e, 1.0, 1.0, m, 0.05).value; };
  CHECK(v(FadingModel::kFullDuplexUpper) >= v(FadingModel::kFullDuplexLower));
  CHECK(v(FadingModel::kScenarioIIUpper) >= v(FadingModel::kScenarioII));
  CHECK(v(FadingModel::kScenarioIIIUpper) >= v(FadingModel::kScenarioIII));
  CHECK(v(FadingModel::kScenarioIII) >= v(FadingModel::kScenarioII));
  CHECK(v(FadingModel::kScenarioII) >= v(FadingModel::kScenarioI));
}

TEST_CASE("guards") {
  const ParallelProblem four{std::vector<SubchannelSpec>(4, SubchannelSpec(1.0, 0.5, 1.0)), 1.0, 1.0};
  CHECK_THROWS_AS(grid_maxmin_parallel(four, 0.1), DomainError);
  const ParallelProblem two{std::vector<SubchannelSpec>(2, SubchannelSpec(1.0, 0.5, 1.0)), 1.0, 1.0};
  CHECK_THROWS_AS(grid_maxmin_parallel(two, 0.2), DomainError);
  CHECK_THROWS_AS(grid_maxmin_parallel(two, 0.0), DomainError);
  CHECK_THROWS_AS(grid_maxmin_parallel(two, -0.01), DomainError);
  const ParallelProblem three{std::vector<SubchannelSpec>(3, SubchannelSpec(1.0, 0.5, 1.0)), 1.0, 1.0};
  CHECK_THROWS_AS(grid_sync_parallel(three, 0.1), DomainError);

  const StateEnsemble e3({{0.25, 1, 1, 1}, {0.25, 1, 1, 1}, {0.5, 1, 1, 1}});
  const StateEnsemble e4({{0.25, 1, 1, 1}, {0.25, 1, 1, 1}, {0.25, 1, 1, 1}, {0.25, 1, 1, 1}});
  CHECK_THROWS_AS(grid_maxmin_fading(e4, 1, 1, FadingModel::kFullDuplexLower, 0.1), DomainError);
  CHECK_THROWS_AS(grid_maxmin_fading(e3, 1, 1, FadingModel::kScenarioIII, 0.1), DomainError);
  CHECK_THROWS_AS(grid_maxmin_fading(e3, 1, 1, FadingModel::kFullDuplexLower, 1e-4), DomainError);
  CHECK_THROWS_AS(grid_maxmin_fading(e3, -1, 1, FadingModel::kFullDuplexLower, 0.1), DomainError);
}

TEST_CASE("model names") {
  CHECK(to_string(FadingModel::kFullDuplexLower) == "full-duplex-lower");
  CHECK(to_string(FadingModel::kScenarioIIIUpper) == "scenarioIII-upper");
}
