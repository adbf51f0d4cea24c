#include "two_hop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include <fmt/format.h>

#include "summation.hpp"

namespace relaycap::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKktStop = 1e-10;
constexpr int kStallSweeps = 20;

double budget_of(std::span<const LinkState> s, std::span<const double> x) {
  CompensatedSum sum;
  for (std::size_t k = 0; k < s.size(); ++k) sum.add(s[k].w * x[k]);
  return sum.value();
}

// Stationary source power of one state for the harmonic level c.
double source_power(const LinkState& s, double alpha, double q, double c) {
  const bool mac_term = s.g1 > 0.0 && alpha > 0.0;
  const bool dec_term = s.h > 0.0 && alpha < 1.0;
  const double a = mac_term ? (1.0 + s.g2 * q) / s.g1 : kInf;
  if (mac_term && dec_term) return harmonic_root(alpha, a, 1.0 / s.h, c).value_or(0.0);
  if (mac_term) return std::max(0.0, alpha / c - a);
  if (dec_term) return std::max(0.0, (1.0 - alpha) / c - 1.0 / s.h);
  return 0.0;
}

// d(alpha R1 + (1 - alpha) R2)/dp_k per unit weight, in bits.
double source_gradient(const TwoHopModel& m, const LinkState& s, double alpha, double p, double q) {
  const double x = 1.0 + s.g1 * p + s.g2 * q;
  return m.rate_scale / std::numbers::ln2 *
         (alpha * s.g1 / x + (1.0 - alpha) * s.h / (1.0 + s.h * p));
}

double relay_gradient(const TwoHopModel& m, const LinkState& s, double alpha, double p, double q) {
  const double x = 1.0 + s.g1 * p + s.g2 * q;
  return m.rate_scale / std::numbers::ln2 * alpha * s.g2 / x;
}

struct SourceStep {
  std::vector<double> p;
  double lambda = 0.0;
};

SourceStep source_step(const TwoHopModel& m, double alpha, std::span<const double> q,
                       const SolverConfig& cfg) {
  const std::size_t n = m.states.size();
  SourceStep out;
  out.p.assign(n, 0.0);
  auto fill = [&](double c, std::vector<double>& p) {
    for (std::size_t k = 0; k < n; ++k) p[k] = source_power(m.states[k], alpha, q[k], c);
  };
  std::vector<double> scratch(n);
  auto usage = [&](double c) {
    fill(c, scratch);
    return budget_of(m.states, scratch);
  };
  const double c = solve_budget_multiplier(usage, m.p_budget, cfg.tol_budget);
  if (std::isfinite(c)) fill(c, out.p);
  out.lambda = std::isfinite(c) ? c * m.rate_scale / std::numbers::ln2 : 0.0;
  return out;
}

struct RelayStep {
  std::vector<double> q;
  double nu = 0.0;
};

// Water-fill relay power over equivalent noise (1 + g1 p) / g2.
RelayStep relay_step(const TwoHopModel& m, std::span<const double> p) {
  const std::size_t n = m.states.size();
  std::vector<double> noise(n), w(n);
  const std::vector<double> ones(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const LinkState& s = m.states[k];
    noise[k] = s.g2 > 0.0 ? (1.0 + s.g1 * p[k]) / s.g2 : kInf;
    w[k] = s.w;
  }
  WaterfillResult wf = waterfill(noise, w, ones, m.q_budget);
  return RelayStep{std::move(wf.allocation), wf.water_level};
}

// Per-state maximizer of alpha ln x + (1 - alpha) ln(1 + h p) - c p - d q with
// x = 1 + g1 p + g2 q.
std::pair<double, double> joint_state(const LinkState& s, double alpha, double c, double d) {
  if (s.g2 > 0.0 && d > 0.0 && c > d * s.g1 / s.g2) {
    const double p = s.h > 0.0 ? std::max(0.0, (1.0 - alpha) / (c - d * s.g1 / s.g2) - 1.0 / s.h)
                               : 0.0;
    const double q = alpha / d - (1.0 + s.g1 * p) / s.g2;
    if (q > 0.0) return {p, q};
  }
  return {source_power(s, alpha, 0.0, c), 0.0};
}

struct JointStep {
  std::vector<double> p, q;
  double c = 0.0, d = 0.0;
};

// Exact maximizer at fixed alpha: the source level is solved for each relay
// level, and the relay level is solved on top of that.
JointStep joint_step(const TwoHopModel& m, double alpha, const SolverConfig& cfg) {
  const std::size_t n = m.states.size();
  JointStep out;
  out.p.assign(n, 0.0);
  out.q.assign(n, 0.0);
  auto fill = [&](double c, double d) {
    for (std::size_t k = 0; k < n; ++k) {
      std::tie(out.p[k], out.q[k]) = joint_state(m.states[k], alpha, c, d);
    }
  };
  auto source_level = [&](double d) {
    return solve_budget_multiplier(
        [&](double c) {
          fill(c, d);
          return budget_of(m.states, out.p);
        },
        m.p_budget, cfg.tol_budget);
  };
  out.d = solve_budget_multiplier(
      [&](double d) {
        fill(source_level(d), d);
        return budget_of(m.states, out.q);
      },
      m.q_budget, cfg.tol_budget);
  out.c = source_level(out.d);
  fill(out.c, out.d);
  return out;
}

double objective(const TwoHopModel& m, double alpha, std::span<const double> p,
                 std::span<const double> q) {
  return alpha * two_hop_r1(m, p, q) + (1.0 - alpha) * two_hop_r2(m, p);
}

InnerResult finalize(const TwoHopModel& m, std::vector<double> p, std::vector<double> q) {
  InnerResult r;
  r.r1 = two_hop_r1(m, p, q);
  r.r2 = two_hop_r2(m, p);
  r.allocation.p = std::move(p);
  r.allocation.p_r = std::move(q);
  return r;
}

double level_to_multiplier(const TwoHopModel& m, double nu) {
  return std::isfinite(nu) && nu > 0.0 ? m.rate_scale / (std::numbers::ln2 * nu) : 0.0;
}

}  // namespace

double two_hop_r1(const TwoHopModel& m, std::span<const double> p, std::span<const double> q) {
  if (p.size() != m.states.size() || q.size() != m.states.size()) {
    throw DomainError("two_hop_r1: allocation dimension mismatch");
  }
  CompensatedSum sum;
  for (std::size_t k = 0; k < m.states.size(); ++k) {
    const LinkState& s = m.states[k];
    sum.add(s.w * std::log2(1.0 + s.g1 * p[k] + s.g2 * q[k]));
  }
  return m.rate_scale * sum.value();
}

double two_hop_r2(const TwoHopModel& m, std::span<const double> p) {
  if (p.size() != m.states.size()) throw DomainError("two_hop_r2: allocation dimension mismatch");
  CompensatedSum sum;
  for (std::size_t k = 0; k < m.states.size(); ++k) {
    const LinkState& s = m.states[k];
    sum.add(s.w * std::log2(1.0 + s.h * p[k]));
  }
  return m.rate_scale * sum.value();
}

InnerResult two_hop_inner(const TwoHopModel& m, double alpha, const SolverConfig& cfg) {
  const std::size_t n = m.states.size();
  if (n == 0) throw DomainError("two_hop_inner: no states");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("two_hop_inner: alpha outside [0,1]");
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = m.states[k].w;

  if (alpha == 0.0) {
    // Two-level water-filling.
    std::vector<double> noise(n);
    const std::vector<double> ones(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      noise[k] = m.states[k].h > 0.0 ? 1.0 / m.states[k].h : kInf;
    }
    WaterfillResult src = waterfill(noise, w, ones, m.p_budget);
    RelayStep rel = relay_step(m, src.allocation);
    InnerResult r = finalize(m, std::move(src.allocation), std::move(rel.q));
    r.lambda = level_to_multiplier(m, src.water_level);
    r.mu = level_to_multiplier(m, rel.nu);
    return r;
  }

  if (alpha == 1.0) {
    std::vector<double> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = m.states[k].g1;
      b[k] = m.states[k].g2;
    }
    OrthogonalDivision od = orthogonal_division(w, a, b, m.p_budget, m.q_budget);
    InnerResult r = finalize(m, std::move(od.p), std::move(od.p_r));
    r.lambda = level_to_multiplier(m, od.nu_source);
    r.mu = level_to_multiplier(m, od.nu_relay);
    return r;
  }

  // Iterative water-filling from a uniform relay allocation.
  const double total_w = budget_of(m.states, std::vector<double>(n, 1.0));
  std::vector<double> q(n, m.q_budget / total_w);
  std::vector<double> p(n, 0.0);
  double obj = objective(m, alpha, p, q);
  double worst = 0.0;
  double lambda = 0.0, mu = 0.0;
  auto track = [&](double next) {
    const double scale = std::max(std::abs(next), 1e-300);
    worst = std::min(worst, (next - obj) / scale);
    obj = next;
  };
  for (int it = 1; it <= cfg.max_inner; ++it) {
    const double start = obj;
    SourceStep ps = source_step(m, alpha, q, cfg);
    p = std::move(ps.p);
    lambda = ps.lambda;
    track(objective(m, alpha, p, q));
    RelayStep rs = relay_step(m, p);
    q = std::move(rs.q);
    mu = std::isfinite(rs.nu) && rs.nu > 0.0 ? alpha * level_to_multiplier(m, rs.nu) : 0.0;
    track(objective(m, alpha, p, q));

    const bool flat = std::abs(obj - start) <= cfg.tol_inner * std::max(1.0, std::abs(obj));
    if (flat || it % kStallSweeps == 0) {
      Allocation a{p, q, {}};
      if (two_hop_kkt(m, alpha, a, lambda, mu).stationarity > kKktStop && m.q_budget > 0.0 &&
          m.p_budget > 0.0) {
        // Alternation crawls along the source/relay exchange direction.
        JointStep js = joint_step(m, alpha, cfg);
        a.p = p = std::move(js.p);
        a.p_r = q = std::move(js.q);
        lambda = std::isfinite(js.c) ? js.c * m.rate_scale / std::numbers::ln2 : 0.0;
        mu = std::isfinite(js.d) ? js.d * m.rate_scale / std::numbers::ln2 : 0.0;
        track(objective(m, alpha, p, q));
      }
      const KktReport kkt = two_hop_kkt(m, alpha, a, lambda, mu);
      if (kkt.stationarity <= kKktStop) {
        InnerResult r = finalize(m, std::move(p), std::move(q));
        r.lambda = lambda;
        r.mu = mu;
        r.iterations = it;
        r.worst_half_step_delta = worst;
        return r;
      }
    }
  }
  throw ConvergenceError(fmt::format(
      "iterative water-filling did not converge in {} iterations (alpha={}, objective={})",
      cfg.max_inner, alpha, obj));
}

MaxMinSolution two_hop_optimize(const TwoHopModel& m, const SolverConfig& cfg,
                                const std::string& description) {
  MaxMinProblem problem;
  problem.description = description;
  problem.inner_maximize = [&](double alpha) { return two_hop_inner(m, alpha, cfg); };
  problem.evaluate = [&](const Allocation& a) {
    return std::pair{two_hop_r1(m, a.p, a.p_r), two_hop_r2(m, a.p)};
  };
  return solve_maxmin(problem, cfg);
}

KktReport two_hop_kkt(const TwoHopModel& m, double alpha, const Allocation& alloc, double lambda,
                      double mu) {
  const std::size_t n = m.states.size();
  if (alloc.p.size() != n || alloc.p_r.size() != n) {
    throw DomainError("two_hop_kkt: allocation dimension mismatch");
  }
  KktReport rep;
  const double relay_alpha = alpha == 0.0 ? 1.0 : alpha;
  for (std::size_t k = 0; k < n; ++k) {
    const LinkState& s = m.states[k];
    const double p = alloc.p[k];
    const double q = alloc.p_r[k];
    if (lambda > 0.0 && std::isfinite(lambda)) {
      const double d = source_gradient(m, s, alpha, p, q) / lambda - 1.0;
      rep.stationarity = std::max(rep.stationarity, p > 0.0 ? std::abs(d) : std::max(0.0, d));
    }
    if (mu > 0.0 && std::isfinite(mu)) {
      const double d = relay_gradient(m, s, relay_alpha, p, q) / mu - 1.0;
      rep.stationarity = std::max(rep.stationarity, q > 0.0 ? std::abs(d) : std::max(0.0, d));
    }
  }
  auto budget_residual = [&](std::span<const double> x, double budget, double multiplier) {
    if (budget <= 0.0 || !(multiplier > 0.0)) return 0.0;
    return std::abs(budget_of(m.states, x) - budget) / budget;
  };
  rep.budget = std::max(budget_residual(alloc.p, m.p_budget, lambda),
                        budget_residual(alloc.p_r, m.q_budget, mu));
  return rep;
}

}  // namespace relaycap::detail
