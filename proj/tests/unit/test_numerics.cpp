#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "relaycap/numerics.hpp"

using namespace relaycap;

namespace {

const SolverConfig kCfg;

// Toy problem over t in [0,1] with an explicit inner maximizer.
MaxMinProblem toy(std::function<double(double)> r1, std::function<double(double)> r2,
                  std::function<double(double)> argmax) {
  MaxMinProblem p;
  p.description = "toy";
  p.inner_maximize = [=](double alpha) {
    InnerResult r;
    const double t = argmax(alpha);
    r.allocation.p = {t};
    r.r1 = r1(t);
    r.r2 = r2(t);
    return r;
  };
  p.evaluate = [=](const Allocation& a) { return std::make_pair(r1(a.p[0]), r2(a.p[0])); };
  return p;
}

}  // namespace

TEST_CASE("waterfill examples") {
  const std::vector<double> one{1.0};
  auto r = waterfill(one, one, one, 1.0);
  CHECK(r.allocation[0] == doctest::Approx(1.0));
  CHECK(r.water_level == doctest::Approx(2.0));
  CHECK(r.multiplier == doctest::Approx(1.0 / (2.0 * std::log(2.0))));

  const std::vector<double> ones{1.0, 1.0};
  r = waterfill(ones, ones, ones, 2.0);
  CHECK(r.allocation[0] == doctest::Approx(1.0));
  CHECK(r.allocation[1] == doctest::Approx(1.0));

  const std::vector<double> n{1.0, 3.0};
  r = waterfill(n, ones, ones, 1.0);
  CHECK(r.allocation[0] == doctest::Approx(1.0));
  CHECK(r.allocation[1] == 0.0);
  CHECK(r.water_level == doctest::Approx(2.0));
}

TEST_CASE("waterfill zero budget and errors") {
  const std::vector<double> n{1.0, 2.0}, w{1.0, 1.0};
  const auto r = waterfill(n, w, w, 0.0);
  CHECK(r.allocation[0] == 0.0);
  CHECK(r.allocation[1] == 0.0);
  CHECK_THROWS_AS(waterfill({}, {}, {}, 1.0), DomainError);
  const std::vector<double> bad{1.0, 0.0};
  CHECK_THROWS_AS(waterfill(n, bad, w, 1.0), DomainError);
  CHECK_THROWS_AS(waterfill(n, w, bad, 1.0), DomainError);
  CHECK_THROWS_AS(waterfill(n, w, w, -1.0), DomainError);
}

TEST_CASE("waterfill slackness, budget and monotonicity on random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 9;
    std::vector<double> n(k), w(k), s(k);
    for (int i = 0; i < k; ++i) {
      n[i] = u(rng);
      w[i] = u(rng);
      s[i] = u(rng);
    }
    const double budget = u(rng);
    const auto r = waterfill(n, w, s, budget);
    double used = 0.0;
    for (int i = 0; i < k; ++i) {
      used += w[i] * r.allocation[i];
      if (r.allocation[i] > 0.0) {
        CHECK(std::abs(n[i] + r.allocation[i] / s[i] - r.water_level) <= 1e-12 * r.water_level);
      } else {
        CHECK(n[i] >= r.water_level - 1e-12);
      }
    }
    CHECK(std::abs(used - budget) <= 1e-10 * budget);
    const auto more = waterfill(n, w, s, budget * 1.5);
    for (int i = 0; i < k; ++i) CHECK(more.allocation[i] >= r.allocation[i] - 1e-15);
  }
}

TEST_CASE("harmonic_root examples") {
  CHECK(*harmonic_root(1.0, 2.0, 7.0, 0.25) == doctest::Approx(2.0));
  CHECK(*harmonic_root(0.5, 1.0, 1.0, 0.5) == doctest::Approx(1.0));
  CHECK(*harmonic_root(0.5, 1.0, 3.0, 0.2) == doctest::Approx(3.1925824035672520).epsilon(1e-12));
  CHECK_FALSE(harmonic_root(0.5, 1.0, 3.0, 1.0).has_value());
  CHECK_THROWS_AS(harmonic_root(0.5, 0.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(harmonic_root(0.5, 1.0, 1.0, std::nan("")), DomainError);
}

TEST_CASE("harmonic_root substitutes back") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(1e-3, 10.0), a01(0.0, 1.0);
  int found = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const double alpha = a01(rng), a = u(rng), b = u(rng), c = u(rng) * 0.2;
    const auto x = harmonic_root(alpha, a, b, c);
    const double at_zero = alpha / a + (1.0 - alpha) / b;
    CHECK(x.has_value() == (at_zero > c));
    if (!x) continue;
    ++found;
    const double lhs = alpha / (*x + a) + (1.0 - alpha) / (*x + b);
    CHECK(std::abs(lhs - c) <= 1e-10 * c);
  }
  CHECK(found > 100);
}

TEST_CASE("bisect_root examples") {
  CHECK(bisect_root([](double x) { return x - 1.0; }, 0.0, 2.0, 1e-12) == doctest::Approx(1.0));
  CHECK(bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK(bisect_root([](double x) { return std::exp2(x) - 3.0; }, 0.0, 4.0, 1e-12) ==
        doctest::Approx(std::log2(3.0)).epsilon(1e-11));
  CHECK_THROWS_AS(bisect_root([](double x) { return x + 1.0; }, 0.0, 2.0, 1e-12), BracketError);
  CHECK_THROWS_AS(bisect_root([](double x) { return x; }, 2.0, 0.0, 1e-12), DomainError);
}

TEST_CASE("solve_budget_multiplier meets the budget") {
  // usage(c) = sum (1/c - n_k)^+ for n = {1, 2}.
  auto usage = [](double c) { return std::max(0.0, 1.0 / c - 1.0) + std::max(0.0, 1.0 / c - 2.0); };
  const double c = solve_budget_multiplier(usage, 3.0, 1e-12);
  CHECK(c == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(std::isinf(solve_budget_multiplier([](double) { return 0.0; }, 1.0, 1e-12)));
}

TEST_CASE("orthogonal_division funds each state once") {
  const std::vector<double> w{0.5, 0.5}, a{2.0, 0.1}, b{0.1, 2.0};
  const auto od = orthogonal_division(w, a, b, 1.0, 1.0);
  CHECK(od.p[0] == doctest::Approx(2.0));
  CHECK(od.p[1] == 0.0);
  CHECK(od.p_r[0] == 0.0);
  CHECK(od.p_r[1] == doctest::Approx(2.0));
}

TEST_CASE("solve_maxmin: Case 1 when R1 dominates") {
  const auto p = toy([](double t) { return 3.0 - t; }, [](double t) { return t; },
                     [](double alpha) { return alpha < 0.5 ? 1.0 : 0.0; });
  const auto s = solve_maxmin(p, kCfg);
  CHECK(s.case_tag == CaseTag::kCase1R2Binding);
  CHECK(s.rate_bits == doctest::Approx(1.0));
  CHECK(s.allocation.p[0] == doctest::Approx(1.0));
  CHECK(s.alpha_star == 0.0);
}

TEST_CASE("solve_maxmin: Case 2 when R2 dominates") {
  const auto p = toy([](double t) { return t; }, [](double t) { return t + 1.0; },
                     [](double) { return 1.0; });
  const auto s = solve_maxmin(p, kCfg);
  CHECK(s.case_tag == CaseTag::kCase2R1Binding);
  CHECK(s.rate_bits == doctest::Approx(1.0));
  CHECK(s.alpha_star == 1.0);
}

TEST_CASE("solve_maxmin: Case 3 equalizer") {
  const auto p = toy([](double t) { return std::sqrt(t); }, [](double t) { return 1.0 - t; },
                     [](double alpha) {
                       if (alpha >= 2.0 / 3.0) return 1.0;
                       const double r = alpha / (2.0 * (1.0 - alpha));
                       return r * r;
                     });
  const auto s = solve_maxmin(p, kCfg);
  CHECK(s.case_tag == CaseTag::kCase3Equalizer);
  CHECK(s.rate_bits == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-8));
  CHECK(s.allocation.p[0] == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-7));
  CHECK(std::abs(s.r1_bits - s.r2_bits) <= kCfg.tol_rate);
  CHECK(s.rate_bits == std::min(s.r1_bits, s.r2_bits));

  // No probe beats the returned value, and V(alpha) is convex over the probes.
  std::vector<AlphaProbe> probes = s.probes;
  for (const AlphaProbe& q : probes) CHECK(std::min(q.r1, q.r2) <= s.rate_bits + 1e-12);
  std::sort(probes.begin(), probes.end(),
            [](const AlphaProbe& x, const AlphaProbe& y) { return x.alpha < y.alpha; });
  for (std::size_t i = 1; i + 1 < probes.size(); ++i) {
    const AlphaProbe &l = probes[i - 1], &m = probes[i], &r = probes[i + 1];
    if (r.alpha - l.alpha <= 0.0) continue;
    const double t = (m.alpha - l.alpha) / (r.alpha - l.alpha);
    CHECK(m.value() <= (1.0 - t) * l.value() + t * r.value() + 1e-9);
  }
}

TEST_CASE("solve_maxmin propagates inner failures") {
  MaxMinProblem p;
  p.inner_maximize = [](double) -> InnerResult { throw ConvergenceError("inner failed"); };
  CHECK_THROWS_AS(solve_maxmin(p, kCfg), ConvergenceError);
  CHECK_THROWS_AS(solve_maxmin(MaxMinProblem{}, kCfg), DomainError);
}
