#include <doctest.h>

#include <cmath>
#include <random>

#include "../support.hpp"
#include "relaycap/cli.hpp"
#include "relaycap/half_duplex.hpp"
#include "relaycap/oracle.hpp"
#include "relaycap/sampling.hpp"

using namespace relaycap;
using relaycap::testing::log_uniform;
using relaycap::testing::random_ensemble;

namespace {
const SolverConfig kCfg;
const double kLog3 = std::log2(3.0);
const HalfDuplexBound kLo = HalfDuplexBound::kLower;
const HalfDuplexBound kUp = HalfDuplexBound::kUpper;

StateEnsemble single(double g1, double g2, double g3) { return StateEnsemble({{1.0, g1, g2, g3}}); }

const StateEnsemble& two_state() {
  static const StateEnsemble e({{0.5, 0.1, 0.1, 1.0}, {0.5, 1.0, 1.0, 0.2}});
  return e;
}

void check_solution(const HalfDuplexProblem& p, HalfDuplexBound b, const MaxMinSolution& s) {
  CHECK(s.rate_bits == std::min(s.r1_bits, s.r2_bits));
  if (s.case_tag == CaseTag::kCase3Equalizer) CHECK(std::abs(s.r1_bits - s.r2_bits) <= 1e-8);
  const auto kkt = hd_kkt(p, b, s);
  CHECK(kkt.powers.stationarity <= 1e-8);
  CHECK(kkt.powers.budget <= 1e-10);
  CHECK(kkt.theta <= 1e-8);
  const auto [r1, r2] = hd_rate_terms(p, b, s.allocation);
  CHECK(r1 == doctest::Approx(s.r1_bits).epsilon(1e-12));
  CHECK(r2 == doctest::Approx(s.r2_bits).epsilon(1e-12));
}
}  // namespace

TEST_CASE("rate terms") {
  const HalfDuplexProblem p{single(1, 1, 4), 1.0, 1.0, Scenario::kI};
  auto [r1, r2] = hd_rate_terms(p, {{1.0}, {1.0}, {0.5}});
  CHECK(r1 == doctest::Approx(kLog3));
  CHECK(r2 == doctest::Approx(kLog3));

  const HalfDuplexProblem p3{single(1, 1, 4), 1.0, 1.0, Scenario::kIII};
  std::tie(r1, r2) = hd_rate_terms(p3, {{1.0}, {5.0}, {1.0}});
  CHECK(r1 == doctest::Approx(1.0));
  std::tie(r1, r2) = hd_rate_terms(p3, {{0.0}, {1.0}, {0.0}});
  CHECK(r1 == doctest::Approx(1.0));
  CHECK(r2 == 0.0);
  std::tie(r1, r2) = hd_rate_terms(p3, kUp, {{1.0}, {0.0}, {1.0}});
  CHECK(r2 == doctest::Approx(std::log2(6.0)));
}

TEST_CASE("rate terms reject malformed theta") {
  const HalfDuplexProblem p1{single(1, 1, 4), 1.0, 1.0, Scenario::kI};
  CHECK_THROWS_AS(hd_rate_terms(p1, {{1.0}, {1.0}, {0.4}}), DomainError);
  const HalfDuplexProblem p3{single(1, 1, 4), 1.0, 1.0, Scenario::kIII};
  CHECK_THROWS_AS(hd_rate_terms(p3, {{1.0}, {1.0}, {1.5}}), DomainError);
  CHECK_THROWS_AS(hd_rate_terms(p3, {{1.0}, {1.0}, {}}), DomainError);
  const HalfDuplexProblem p2{two_state(), 1.0, 1.0, Scenario::kII};
  CHECK_THROWS_AS(hd_rate_terms(p2, {{1.0, 1.0}, {1.0, 1.0}, {0.3, 0.6}}), DomainError);
}

TEST_CASE("Scenario I: single class-A state without relay power") {
  const HalfDuplexProblem p{single(1, 1, 4), 1.0, 0.0, Scenario::kI};
  const auto s = hd_scenario1_optimize(p, kCfg);
  CHECK(s.case_tag == CaseTag::kCase2R1Binding);
  CHECK(s.rate_bits == doctest::Approx(0.5 * kLog3).epsilon(1e-12));
  check_solution(p, kLo, s);
}

TEST_CASE("Scenario I: single class-A^c state is direct-link limited") {
  const HalfDuplexProblem p{single(1, 1, 0.5), 1.0, 1.0, Scenario::kI};
  const auto s = hd_scenario1_optimize(p, kCfg);
  CHECK(s.case_tag == CaseTag::kCase1R2Binding);
  CHECK(s.rate_bits == doctest::Approx(0.5 * kLog3).epsilon(1e-12));
}

TEST_CASE("Scenario I: two-state instance against the grid oracle") {
  const HalfDuplexProblem p{two_state(), 2.0, 0.5, Scenario::kI};
  const auto s = hd_scenario1_optimize(p, kCfg);
  // Grid oracle at 1e-3 of each budget: 1.1415708169.
  CHECK(std::abs(s.rate_bits - 1.1415708169) <= 5e-3);
  CHECK(s.rate_bits >= 1.1415708169 - 1e-8);
  check_solution(p, kLo, s);
}

TEST_CASE("Scenario I saturates in the relay budget") {
  const StateEnsemble e = generate_rayleigh_ensemble(500, 3, 0.1, 0.1, 1.0);
  const HalfDuplexProblem p{e, db_to_linear(3.0), db_to_linear(15.0), Scenario::kI};
  const auto base = hd_scenario1_optimize(p, kCfg);
  REQUIRE(base.case_tag == CaseTag::kCase1R2Binding);
  for (double pr_db : {18.0, 25.0, 40.0}) {
    const HalfDuplexProblem q{e, p.p_budget, db_to_linear(pr_db), Scenario::kI};
    CHECK(std::abs(hd_scenario1_optimize(q, kCfg).rate_bits - base.rate_bits) <= 1e-9);
  }
}

TEST_CASE("Scenario II: no class-A states collapses to the direct link") {
  const StateEnsemble e({{0.5, 1.0, 2.0, 1.0}, {0.5, 0.3, 0.5, 0.3}});
  const HalfDuplexProblem p{e, 1.0, 1.0, Scenario::kII};
  const auto s = hd_scenario2_optimize(p, kCfg);
  CHECK(s.allocation.theta[0] == doctest::Approx(1.0));
  CHECK(s.rate_bits == doctest::Approx(direct_link_rate(e, 1.0)).epsilon(1e-9));
}

TEST_CASE("Scenario II: single state against the theta oracle") {
  const HalfDuplexProblem p{single(1, 1, 4), 1.0, 1.0, Scenario::kII};
  const auto s = hd_scenario2_optimize(p, kCfg);
  // One-dimensional theta grid at 1e-4: 1.5849625007 at theta = 1/2.
  CHECK(s.rate_bits == doctest::Approx(1.5849625007).epsilon(1e-9));
  CHECK(s.allocation.theta[0] == doctest::Approx(0.5).epsilon(1e-6));
  check_solution(p, kLo, s);
  const auto up = hd_scenario2_upper_bound(p, kCfg);
  CHECK(up.rate_bits >= s.rate_bits - 1e-9);
  check_solution(p, kUp, up);
}

TEST_CASE("Scenario II: two-state instance against the grid oracle") {
  const HalfDuplexProblem p{two_state(), 2.0, 0.5, Scenario::kII};
  const auto s = hd_scenario2_optimize(p, kCfg);
  // Grid oracle at 1e-3 (powers and theta): 1.2624885554.
  CHECK(std::abs(s.rate_bits - 1.2624885554) <= 5e-3);
  CHECK(s.rate_bits >= 1.2624885554 - 1e-8);
  check_solution(p, kLo, s);
}

TEST_CASE("upper bounds coincide without a source-relay link") {
  const StateEnsemble e({{0.5, 1.0, 2.0, 0.0}, {0.5, 0.3, 0.5, 0.0}});
  for (Scenario sc : {Scenario::kII, Scenario::kIII}) {
    const HalfDuplexProblem p{e, 1.0, 1.0, sc};
    CHECK(hd_optimize(p, kUp, kCfg).rate_bits ==
          doctest::Approx(hd_optimize(p, kLo, kCfg).rate_bits).epsilon(1e-9));
  }
}

TEST_CASE("Scenario III: the R1-only maximizer of a symmetric A^c state uses theta = 1/2") {
  const HalfDuplexProblem p{single(1, 1, 0.5), 1.0, 1.0, Scenario::kIII};
  const InnerResult r = hd_inner(p, kLo, 1.0, kCfg);
  CHECK(r.allocation.theta[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.r1 == doctest::Approx(kLog3).epsilon(1e-9));
}

TEST_CASE("Scenario III: two-state instance against the grid oracle") {
  const HalfDuplexProblem p{two_state(), 2.0, 0.5, Scenario::kIII};
  const auto s = hd_scenario3_optimize(p, kCfg);
  // Grid oracle at 1e-2 (powers and per-state theta): 1.2636036662.
  CHECK(std::abs(s.rate_bits - 1.2636036662) <= 1e-2);
  CHECK(s.rate_bits >= 1.2636036662 - 1e-8);
  check_solution(p, kLo, s);
  const auto up = hd_scenario3_upper_bound(p, kCfg);
  CHECK(up.rate_bits >= s.rate_bits - 1e-9);
  check_solution(p, kUp, up);
}

TEST_CASE("certification") {
  SUBCASE("relay cut off") {
    const StateEnsemble e({{0.5, 1.0, 0.0, 3.0}, {0.5, 0.4, 0.0, 0.1}});
    for (Scenario sc : {Scenario::kII, Scenario::kIII}) {
      const auto cap = hd_certify_capacity({e, 1.0, 1.0, sc}, kCfg);
      REQUIRE(cap.has_value());
      CHECK(*cap == doctest::Approx(direct_link_rate(e, 1.0)).epsilon(1e-9));
    }
  }
  SUBCASE("Rayleigh setup below the matching threshold") {
    const StateEnsemble e = generate_rayleigh_ensemble(2000, 5, 0.1, 0.1, 1.0);
    const HalfDuplexProblem p{e, db_to_linear(3.0), db_to_linear(0.0), Scenario::kII};
    const auto cap = hd_certify_capacity(p, kCfg);
    REQUIRE(cap.has_value());
    CHECK(std::abs(*cap - hd_scenario2_upper_bound(p, kCfg).rate_bits) <= kCfg.tol_rate);
    CHECK(hd_scenario2_optimize(p, kCfg).capacity_certified);
  }
  SUBCASE("strong relay with a large budget") {
    for (Scenario sc : {Scenario::kII, Scenario::kIII}) {
      CHECK_FALSE(hd_certify_capacity({single(1, 10, 4), 1.0, 10.0, sc}, kCfg).has_value());
    }
  }
  CHECK_THROWS_AS(hd_certify_capacity({single(1, 1, 4), 1.0, 1.0, Scenario::kI}, kCfg), DomainError);
}

TEST_CASE("theta derivative changes sign across (0,1)") {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 20; ++i) {
    const StateEnsemble e = random_ensemble(rng, 1 + i % 6);
    const double pb = log_uniform(rng, 0.1, 10.0), qb = log_uniform(rng, 0.1, 10.0);
    const HalfDuplexProblem p{e, pb, qb, Scenario::kII};
    const std::size_t n = e.size();
    for (double alpha : {0.3, 1.0}) {
      const Allocation lo{std::vector<double>(n, pb), std::vector<double>(n, qb),
                          std::vector<double>(n, 1e-9)};
      const Allocation hi{lo.p, lo.p_r, std::vector<double>(n, 1.0 - 1e-9)};
      CHECK(hd_theta_derivative(p, kLo, alpha, lo) > 0.0);
      CHECK(hd_theta_derivative(p, kLo, alpha, hi) < 0.0);
    }
  }
}

TEST_CASE("random ensembles: nesting, ordering and KKT") {
  std::mt19937_64 rng(52);
  for (int i = 0; i < 25; ++i) {
    const StateEnsemble e = random_ensemble(rng, 1 + i % 8);
    const double pb = log_uniform(rng, 0.1, 10.0), qb = log_uniform(rng, 0.1, 10.0);
    const HalfDuplexProblem p1{e, pb, qb, Scenario::kI}, p2{e, pb, qb, Scenario::kII},
        p3{e, pb, qb, Scenario::kIII};
    const auto s1 = hd_optimize(p1, kLo, kCfg);
    const auto s2 = hd_optimize(p2, kLo, kCfg);
    const auto s3 = hd_optimize(p3, kLo, kCfg);
    const auto u2 = hd_optimize(p2, kUp, kCfg);
    const auto u3 = hd_optimize(p3, kUp, kCfg);
    CHECK(s1.rate_bits <= s2.rate_bits + 1e-9);
    CHECK(s2.rate_bits <= s3.rate_bits + 1e-9);
    CHECK(s2.rate_bits <= u2.rate_bits + 1e-9);
    CHECK(s3.rate_bits <= u3.rate_bits + 1e-9);
    CHECK(u2.rate_bits <= u3.rate_bits + 1e-9);
    check_solution(p1, kLo, s1);
    check_solution(p2, kLo, s2);
    check_solution(p3, kLo, s3);
    check_solution(p2, kUp, u2);
    check_solution(p3, kUp, u3);
    for (const auto* s : {&s1, &s2, &s3, &u2, &u3}) {
      CHECK(s->worst_half_step_delta >= -1e-12);
      CHECK(s->max_inner_iterations < kCfg.max_inner);
    }
  }
}

TEST_CASE("scenario mismatch is rejected") {
  const HalfDuplexProblem p{single(1, 1, 4), 1.0, 1.0, Scenario::kII};
  CHECK_THROWS_AS(hd_scenario1_optimize(p, kCfg), DomainError);
  CHECK_THROWS_AS(hd_scenario3_optimize(p, kCfg), DomainError);
  const HalfDuplexProblem p1{single(1, 1, 4), 1.0, 1.0, Scenario::kI};
  CHECK_THROWS_AS(hd_optimize(p1, kUp, kCfg), DomainError);
  CHECK_THROWS_AS(hd_optimize({single(1, 1, 4), -1.0, 1.0, Scenario::kI}, kLo, kCfg), DomainError);
}
