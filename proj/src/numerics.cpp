#include "relaycap/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

namespace relaycap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_length(std::size_t n, std::size_t m, const char* what) {
  if (n != m) throw DomainError(fmt::format("{}: length mismatch ({} vs {})", what, n, m));
}

Allocation blend(const Allocation& x, const Allocation& y, double s) {
  auto mix = [s](const std::vector<double>& u, const std::vector<double>& v) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = (1.0 - s) * u[i] + s * v[i];
    return out;
  };
  return Allocation{mix(x.p, y.p), mix(x.p_r, y.p_r), mix(x.theta, y.theta)};
}

}  // namespace

WaterfillResult waterfill(std::span<const double> noise_levels, std::span<const double> weights,
                          std::span<const double> scales, double budget) {
  const std::size_t n = noise_levels.size();
  if (n == 0) throw DomainError("waterfill: empty input");
  check_same_length(n, weights.size(), "waterfill");
  check_same_length(n, scales.size(), "waterfill");
  if (!std::isfinite(budget) || budget < 0.0) {
    throw DomainError(fmt::format("waterfill: budget must be finite and >= 0, got {}", budget));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]) || !(scales[i] > 0.0) ||
        !std::isfinite(scales[i])) {
      throw DomainError(fmt::format("waterfill: weight and scale must be > 0 (entry {})", i));
    }
    if (std::isnan(noise_levels[i]) || noise_levels[i] < 0.0) {
      throw DomainError(fmt::format("waterfill: noise level must be >= 0 (entry {})", i));
    }
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(noise_levels[i])) order.push_back(i);
  }
  WaterfillResult out;
  out.allocation.assign(n, 0.0);
  if (order.empty()) {
    out.water_level = kInf;
    out.multiplier = 0.0;
    return out;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return noise_levels[i] < noise_levels[j]; });

  double nu = noise_levels[order.front()];
  if (budget > 0.0) {
    double ws = 0.0;   // sum of w s over the active set
    double wsn = 0.0;  // sum of w s n over the active set
    for (std::size_t j = 0; j < order.size(); ++j) {
      const std::size_t k = order[j];
      ws += weights[k] * scales[k];
      wsn += weights[k] * scales[k] * noise_levels[k];
      nu = (budget + wsn) / ws;
      if (j + 1 == order.size() || nu <= noise_levels[order[j + 1]]) break;
    }
    for (std::size_t k : order) {
      out.allocation[k] = scales[k] * std::max(0.0, nu - noise_levels[k]);
    }
  }
  out.water_level = nu;
  out.multiplier = nu > 0.0 ? 1.0 / (nu * std::log(2.0)) : kInf;
  return out;
}

std::optional<double> harmonic_root(double alpha, double a, double b, double c) {
  if (!std::isfinite(alpha) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw DomainError("harmonic_root: non-finite input");
  }
  if (alpha < 0.0 || alpha > 1.0 || !(a > 0.0) || !(b > 0.0) || !(c > 0.0)) {
    throw DomainError(fmt::format("harmonic_root: need alpha in [0,1] and a, b, c > 0 "
                                  "(alpha={}, a={}, b={}, c={})",
                                  alpha, a, b, c));
  }
  const double at_zero = alpha / a + (1.0 - alpha) / b;
  if (!(at_zero > c)) return std::nullopt;
  // c x^2 + (c(a+b) - 1) x + ab (c - at_zero) = 0; the constant term is
  // negative so the roots have opposite signs.
  const double qb = c * (a + b) - 1.0;
  const double qc = a * b * (c - at_zero);
  const double disc = std::sqrt(qb * qb - 4.0 * c * qc);
  if (qb >= 0.0) {
    const double q = -0.5 * (qb + disc);
    return qc / q;
  }
  const double q = -0.5 * (qb - disc);
  return q / c;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw DomainError("bisect_root: need lo < hi");
  if (!(tol > 0.0)) throw DomainError("bisect_root: tol must be > 0");
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw BracketError(fmt::format("bisect_root: no sign change on [{}, {}] (f={}, {})", lo, hi,
                                   flo, fhi));
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double solve_budget_multiplier(const std::function<double(double)>& usage, double budget,
                               double tol_budget) {
  if (!(budget > 0.0)) return kInf;
  // Work in u = ln c; usage is monotone in u.
  auto excess = [&](double u) { return usage(std::exp(u)) - budget; };
  double lo = std::log(1e-12);
  double hi = std::log(1e12);
  constexpr double kLimit = 690.0;
  double f_lo = excess(lo);
  while (f_lo <= 0.0) {
    if (lo < -kLimit) {
      if (usage(std::exp(lo)) == 0.0) return kInf;
      throw ConvergenceError("solve_budget_multiplier: budget not reachable as c -> 0");
    }
    hi = lo;
    lo -= 10.0;
    f_lo = excess(lo);
  }
  double f_hi = excess(hi);
  while (f_hi > 0.0) {
    if (hi > kLimit) throw ConvergenceError("solve_budget_multiplier: usage does not vanish");
    lo = hi;
    f_lo = f_hi;
    hi += 10.0;
    f_hi = excess(hi);
  }
  if (f_hi == 0.0) return std::exp(hi);
  std::uintmax_t max_iter = 300;
  auto tol = [](double x, double y) { return std::abs(x - y) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)); };
  auto [a, b] = boost::math::tools::toms748_solve(excess, lo, hi, f_lo, f_hi, tol, max_iter);
  // Prefer the side that does not overspend; fall back to the closer one.
  const double fa = excess(a);
  const double fb = excess(b);
  double u = std::abs(fa) <= std::abs(fb) ? a : b;
  const double fu = std::min(std::abs(fa), std::abs(fb));
  if (fu > tol_budget * budget) {
    // Plain bisection finish for curves toms748 could not resolve.
    u = bisect_root(excess, a, b, 1e-15);
  }
  return std::exp(u);
}

OrthogonalDivision orthogonal_division(std::span<const double> weights, std::span<const double> a,
                                       std::span<const double> b, double p_budget,
                                       double q_budget) {
  const std::size_t n = weights.size();
  if (n == 0) throw DomainError("orthogonal_division: empty input");
  check_same_length(n, a.size(), "orthogonal_division");
  check_same_length(n, b.size(), "orthogonal_division");
  if (!(p_budget >= 0.0) || !(q_budget >= 0.0)) {
    throw DomainError("orthogonal_division: budgets must be >= 0");
  }
  OrthogonalDivision out;
  out.p.assign(n, 0.0);
  out.p_r.assign(n, 0.0);

  auto inv = [](double g) { return g > 0.0 ? 1.0 / g : kInf; };
  const std::vector<double> ones(n, 1.0);
  std::vector<double> noise_a(n), noise_b(n);
  for (std::size_t k = 0; k < n; ++k) {
    noise_a[k] = inv(a[k]);
    noise_b[k] = inv(b[k]);
  }

  auto fill_only = [&](bool source) {
    const auto& noise = source ? noise_a : noise_b;
    const double budget = source ? p_budget : q_budget;
    WaterfillResult wf = waterfill(noise, weights, ones, budget);
    (source ? out.p : out.p_r) = std::move(wf.allocation);
    (source ? out.nu_source : out.nu_relay) = wf.water_level;
    // Idle node: the smallest level at which no state wants its power.
    double idle = kInf;
    for (std::size_t k = 0; k < n; ++k) {
      const double other_gain = source ? b[k] : a[k];
      const double own_alloc = source ? out.p[k] : out.p_r[k];
      const double own_gain = source ? a[k] : b[k];
      if (other_gain > 0.0) idle = std::min(idle, (1.0 + own_gain * own_alloc) / other_gain);
    }
    (source ? out.nu_relay : out.nu_source) = idle;
  };

  bool any_a = false, any_b = false;
  for (std::size_t k = 0; k < n; ++k) {
    any_a = any_a || a[k] > 0.0;
    any_b = any_b || b[k] > 0.0;
  }
  if ((p_budget == 0.0 || !any_a) && (q_budget == 0.0 || !any_b)) {
    out.nu_source = kInf;
    out.nu_relay = kInf;
    return out;
  }
  if (q_budget == 0.0 || !any_b) {
    fill_only(true);
    return out;
  }
  if (p_budget == 0.0 || !any_a) {
    fill_only(false);
    return out;
  }

  // Group active states by relay/source gain ratio.
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k] > 0.0 || b[k] > 0.0) idx.push_back(k);
  }
  auto ratio = [&](std::size_t k) { return a[k] > 0.0 ? b[k] / a[k] : kInf; };
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t i, std::size_t j) { return ratio(i) < ratio(j); });
  std::vector<std::vector<std::size_t>> groups;
  std::vector<double> group_ratio;
  for (std::size_t k : idx) {
    if (groups.empty() || ratio(k) != group_ratio.back()) {
      groups.emplace_back();
      group_ratio.push_back(ratio(k));
    }
    groups.back().push_back(k);
  }
  const std::size_t m = groups.size();

  // Water levels for partition j: groups [0, j) funded by the source,
  // [j, m) by the relay.
  auto levels = [&](std::size_t j) {
    std::vector<double> na, wa, nb, wb;
    for (std::size_t g = 0; g < m; ++g) {
      for (std::size_t k : groups[g]) {
        if (g < j) {
          na.push_back(noise_a[k]);
          wa.push_back(weights[k]);
        } else {
          nb.push_back(noise_b[k]);
          wb.push_back(weights[k]);
        }
      }
    }
    const std::vector<double> sa(na.size(), 1.0), sb(nb.size(), 1.0);
    const double nu_s = waterfill(na, wa, sa, p_budget).water_level;
    const double nu_r = waterfill(nb, wb, sb, q_budget).water_level;
    return std::pair{nu_s, nu_r};
  };

  // tau(j) = nu_s / nu_r is non-increasing in j; find the smallest j in
  // [1, m-1] with tau(j) <= ratio of group j (0-based first relay group).
  std::size_t split_group = m;  // m means "pure partition"
  std::size_t partition = 0;
  if (m == 1) {
    split_group = 0;
  } else {
    std::size_t lo = 1, hi = m;  // search in [1, m-1]; hi == m means none found
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      auto [nu_s, nu_r] = levels(mid);
      if (nu_s / nu_r <= group_ratio[mid]) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    if (lo == m) {
      split_group = m - 1;
    } else {
      auto [nu_s, nu_r] = levels(lo);
      if (nu_s / nu_r >= group_ratio[lo - 1]) {
        partition = lo;
      } else {
        split_group = lo - 1;
      }
    }
  }

  if (split_group == m) {
    // Pure orthogonal division.
    std::vector<double> na, wa, nb, wb;
    std::vector<std::size_t> ka, kb;
    for (std::size_t g = 0; g < m; ++g) {
      for (std::size_t k : groups[g]) {
        if (g < partition) {
          na.push_back(noise_a[k]);
          wa.push_back(weights[k]);
          ka.push_back(k);
        } else {
          nb.push_back(noise_b[k]);
          wb.push_back(weights[k]);
          kb.push_back(k);
        }
      }
    }
    const std::vector<double> sa(na.size(), 1.0), sb(nb.size(), 1.0);
    WaterfillResult fa = waterfill(na, wa, sa, p_budget);
    WaterfillResult fb = waterfill(nb, wb, sb, q_budget);
    for (std::size_t i = 0; i < ka.size(); ++i) out.p[ka[i]] = fa.allocation[i];
    for (std::size_t i = 0; i < kb.size(); ++i) out.p_r[kb[i]] = fb.allocation[i];
    out.nu_source = fa.water_level;
    out.nu_relay = fb.water_level;
    return out;
  }

  // Boundary group: nu_r = nu_s / r*. In source-equivalent units the whole
  // problem is one water-fill with budget P + r* Q.
  const double r_star = group_ratio[split_group];
  std::vector<double> noise(n, kInf);
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t k : groups[g]) noise[k] = g <= split_group ? noise_a[k] : r_star * noise_b[k];
  }
  const WaterfillResult joint = waterfill(noise, weights, ones, p_budget + r_star * q_budget);
  const double nu = joint.water_level;
  double left_p = p_budget;
  double left_q = q_budget;
  for (std::size_t g = 0; g < m; ++g) {
    if (g < split_group) {
      for (std::size_t k : groups[g]) {
        out.p[k] = joint.allocation[k];
        left_p -= weights[k] * out.p[k];
      }
    } else if (g > split_group) {
      for (std::size_t k : groups[g]) {
        out.p_r[k] = joint.allocation[k] / r_star;
        left_q -= weights[k] * out.p_r[k];
      }
    }
  }
  const double slack = 1e-12 * (p_budget + r_star * q_budget);
  if (left_p < -slack || left_q * r_star < -slack) {
    throw InvariantError(fmt::format(
        "orthogonal_division: boundary split infeasible (left_p={}, left_q={})", left_p, left_q));
  }
  left_p = std::max(0.0, left_p);
  for (std::size_t k : groups[split_group]) {
    const double e = joint.allocation[k];
    const double take = std::min(e, left_p / weights[k]);
    out.p[k] = take;
    left_p -= weights[k] * take;
    if (left_p < 0.0) left_p = 0.0;
    out.p_r[k] = (e - take) / r_star;
  }
  out.nu_source = nu;
  out.nu_relay = nu / r_star;
  return out;
}

MaxMinSolution solve_maxmin(const MaxMinProblem& problem, const SolverConfig& cfg) {
  cfg.validate();
  if (!problem.inner_maximize) throw DomainError("solve_maxmin: inner_maximize is empty");
  const double tol = cfg.tol_rate;

  MaxMinSolution sol;
  std::optional<InnerResult> best_probe;
  auto run = [&](double alpha) {
    InnerResult r = problem.inner_maximize(alpha);
    sol.probes.push_back(AlphaProbe{alpha, r.r1, r.r2});
    sol.max_inner_iterations = std::max(sol.max_inner_iterations, r.iterations);
    sol.worst_half_step_delta = std::min(sol.worst_half_step_delta, r.worst_half_step_delta);
    if (!best_probe || std::min(r.r1, r.r2) > std::min(best_probe->r1, best_probe->r2)) {
      best_probe = r;
    }
    return r;
  };
  auto finish = [&](InnerResult r, double alpha, CaseTag tag) {
    sol.case_tag = tag;
    sol.alpha_star = alpha;
    sol.r1_bits = r.r1;
    sol.r2_bits = r.r2;
    sol.rate_bits = std::min(r.r1, r.r2);
    sol.allocation = std::move(r.allocation);
    sol.lambda = r.lambda;
    sol.mu = r.mu;
    sol.iterations = static_cast<int>(sol.probes.size());
    if (best_probe && std::min(best_probe->r1, best_probe->r2) > sol.rate_bits + tol) {
      throw InvariantError(fmt::format(
          "solve_maxmin({}): a probed decision ({} bits) beats the returned one ({} bits)",
          problem.description, std::min(best_probe->r1, best_probe->r2), sol.rate_bits));
    }
#ifndef NDEBUG
    // V(alpha) must be convex over the probed points.
    std::vector<AlphaProbe> pr = sol.probes;
    std::sort(pr.begin(), pr.end(),
              [](const AlphaProbe& x, const AlphaProbe& y) { return x.alpha < y.alpha; });
    for (std::size_t i = 1; i + 1 < pr.size(); ++i) {
      const double t = (pr[i].alpha - pr[i - 1].alpha) / (pr[i + 1].alpha - pr[i - 1].alpha);
      const double chord = (1.0 - t) * pr[i - 1].value() + t * pr[i + 1].value();
      if (pr[i].value() > chord + 1e-9 * std::max(1.0, std::abs(chord))) {
        throw InvariantError(fmt::format("solve_maxmin({}): V(alpha) not convex at alpha={}",
                                         problem.description, pr[i].alpha));
      }
    }
#endif
    return sol;
  };

  InnerResult at0 = run(0.0);
  if (at0.r1 >= at0.r2 - tol) {
    return finish(std::move(at0), 0.0,
                  problem.zero_alpha_is_equalizer ? CaseTag::kCase3Equalizer
                                                  : CaseTag::kCase1R2Binding);
  }
  InnerResult at1 = run(1.0);
  if (at1.r1 <= at1.r2 + tol) return finish(std::move(at1), 1.0, CaseTag::kCase2R1Binding);

  // g(alpha) = r1 - r2 is negative at 0 and positive at 1.
  double lo = 0.0, hi = 1.0;
  InnerResult lo_res = std::move(at0);
  InnerResult hi_res = std::move(at1);
  for (int it = 0; it < cfg.max_outer; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    InnerResult r = run(mid);
    const double g = r.r1 - r.r2;
    if (std::abs(g) <= tol) return finish(std::move(r), mid, CaseTag::kCase3Equalizer);
    if (g < 0.0) {
      lo = mid;
      lo_res = std::move(r);
    } else {
      hi = mid;
      hi_res = std::move(r);
    }
  }

  if (!problem.evaluate) {
    throw ConvergenceError(fmt::format(
        "solve_maxmin({}): alpha search ended on [{}, {}] with r1-r2 in [{}, {}]",
        problem.description, lo, hi, lo_res.r1 - lo_res.r2, hi_res.r1 - hi_res.r2));
  }
  // r1 - r2 jumps at alpha*: both bracketing allocations maximize the same
  // concave objective, so any blend of them does too. Blend to equalize.
  double s_lo = 0.0, s_hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double s = 0.5 * (s_lo + s_hi);
    Allocation mixed = blend(lo_res.allocation, hi_res.allocation, s);
    auto [r1, r2] = problem.evaluate(mixed);
    if (std::abs(r1 - r2) <= tol || s_hi - s_lo < 1e-15) {
      InnerResult r;
      r.allocation = std::move(mixed);
      r.r1 = r1;
      r.r2 = r2;
      r.lambda = (1.0 - s) * lo_res.lambda + s * hi_res.lambda;
      r.mu = (1.0 - s) * lo_res.mu + s * hi_res.mu;
      sol.probes.push_back(AlphaProbe{0.5 * (lo + hi), r1, r2});
      return finish(std::move(r), 0.5 * (lo + hi), CaseTag::kCase3Equalizer);
    }
    if (r1 - r2 < 0.0) {
      s_lo = s;
    } else {
      s_hi = s;
    }
  }
  throw ConvergenceError(fmt::format("solve_maxmin({}): blending did not equalize",
                                     problem.description));
}

}  // namespace relaycap
