#include "relaycap/half_duplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/lambert_w.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include "summation.hpp"

namespace relaycap {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct HdState {
  double w = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double h = 0.0;  // gain of the relay-decoding (or cut-set) term
};

struct HdModel {
  std::vector<HdState> states;
  double p = 0.0;
  double q = 0.0;
  Scenario scenario = Scenario::kI;
};

HdModel build_model(const HalfDuplexProblem& problem, HalfDuplexBound bound) {
  problem.validate();
  if (bound == HalfDuplexBound::kUpper && problem.scenario == Scenario::kI) {
    throw DomainError("Scenario I has no separate upper-bound solver");
  }
  HdModel m;
  m.p = problem.p_budget;
  m.q = problem.pr_budget;
  m.scenario = problem.scenario;
  m.states.reserve(problem.ensemble.size());
  for (const FadingState& s : problem.ensemble.states()) {
    double h = s.g1 + s.g3;
    if (bound == HalfDuplexBound::kLower) h = s.in_a() ? s.g3 : s.g1;
    m.states.push_back({s.weight, s.g1, s.g2, h});
  }
  return m;
}

// ln(1+x) - x/(1+x): the theta-derivative of t ln(1 + y/t) at density x = y/t.
double phi(double x) { return x > 0.0 ? std::log1p(x) - x / (1.0 + x) : 0.0; }

// Density s >= 0 maximizing alpha ln(1+s g1) + (1-alpha) ln(1+s h) - c s.
double source_density(const HdState& s, double alpha, double c) {
  if (!std::isfinite(c)) return 0.0;
  const bool direct = s.g1 > 0.0 && alpha > 0.0;
  const bool decode = s.h > 0.0 && alpha < 1.0;
  if (direct && decode) return harmonic_root(alpha, 1.0 / s.g1, 1.0 / s.h, c).value_or(0.0);
  if (direct) return std::max(0.0, alpha / c - 1.0 / s.g1);
  if (decode) return std::max(0.0, (1.0 - alpha) / c - 1.0 / s.h);
  return 0.0;
}

double source_value(const HdState& s, double alpha, double c, double x) {
  return alpha * std::log1p(x * s.g1) + (1.0 - alpha) * std::log1p(x * s.h) - c * x;
}

double relay_density(const HdState& s, double alpha, double d) {
  if (!(s.g2 > 0.0) || !(alpha > 0.0) || !(d > 0.0)) return 0.0;
  return std::max(0.0, alpha / d - 1.0 / s.g2);
}

double relay_value(const HdState& s, double alpha, double d, double u) {
  return alpha * std::log1p(u * s.g2) - d * u;
}

double weighted_sum(const HdModel& m, const std::vector<double>& x) {
  detail::CompensatedSum sum;
  for (std::size_t k = 0; k < m.states.size(); ++k) sum.add(m.states[k].w * x[k]);
  return sum.value();
}

std::pair<double, double> model_rates(const HdModel& m, const Allocation& a) {
  detail::CompensatedSum r1, r2;
  for (std::size_t k = 0; k < m.states.size(); ++k) {
    const HdState& s = m.states[k];
    const double t = a.theta[k];
    r1.add(s.w * (time_shared_rate(a.p[k] * s.g1, t) + time_shared_rate(a.p_r[k] * s.g2, 1.0 - t)));
    r2.add(s.w * time_shared_rate(a.p[k] * s.h, t));
  }
  return {r1.value(), r2.value()};
}

struct SourceFill {
  std::vector<double> s;
  double c = kInf;  // level in nats per unit power; inf when nothing is spent
};

// Densities meeting sum w s = budget.
SourceFill source_fill(const HdModel& m, double alpha, double budget, const SolverConfig& cfg) {
  const std::size_t n = m.states.size();
  SourceFill out;
  out.s.assign(n, 0.0);
  if (!(budget > 0.0)) return out;
  std::vector<double> scratch(n);
  auto usage = [&](double c) {
    for (std::size_t k = 0; k < n; ++k) scratch[k] = source_density(m.states[k], alpha, c);
    return weighted_sum(m, scratch);
  };
  out.c = solve_budget_multiplier(usage, budget, cfg.tol_budget);
  for (std::size_t k = 0; k < n; ++k) out.s[k] = source_density(m.states[k], alpha, out.c);
  return out;
}

struct RelayFill {
  std::vector<double> u;
  double nu = kInf;  // water level 1/(mu ln 2) for unit relay weight
};

RelayFill relay_fill(const HdModel& m, double budget, const std::vector<bool>* allowed = nullptr) {
  const std::size_t n = m.states.size();
  std::vector<double> noise(n), w(n);
  const std::vector<double> ones(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    const HdState& s = m.states[k];
    const bool ok = s.g2 > 0.0 && (allowed == nullptr || (*allowed)[k]);
    noise[k] = ok ? 1.0 / s.g2 : kInf;
    w[k] = s.w;
  }
  WaterfillResult wf = waterfill(noise, w, ones, std::max(0.0, budget));
  RelayFill out;
  out.u = std::move(wf.allocation);
  out.nu = budget > 0.0 ? wf.water_level : kInf;
  return out;
}

double relay_multiplier(double alpha, double nu) {
  if (!std::isfinite(nu) || !(nu > 0.0)) return 0.0;
  return (alpha > 0.0 ? alpha : 1.0) / (nu * kLn2);
}

InnerResult finish(const HdModel& m, Allocation a, double lambda, double mu, int iterations) {
  InnerResult r;
  std::tie(r.r1, r.r2) = model_rates(m, a);
  r.allocation = std::move(a);
  r.lambda = lambda;
  r.mu = mu;
  r.iterations = iterations;
  return r;
}

InnerResult shared_theta_result(const HdModel& m, double alpha, double theta, const SourceFill& src,
                                const RelayFill& rel, int iterations) {
  const std::size_t n = m.states.size();
  Allocation a;
  a.p.resize(n);
  a.p_r.resize(n);
  a.theta.assign(n, theta);
  for (std::size_t k = 0; k < n; ++k) {
    a.p[k] = theta * src.s[k];
    a.p_r[k] = (1.0 - theta) * rel.u[k];
  }
  const double lambda = std::isfinite(src.c) ? src.c / kLn2 : 0.0;
  return finish(m, std::move(a), lambda, relay_multiplier(alpha, rel.nu), iterations);
}

bool can_use_source(const HdModel& m, double alpha) {
  return std::any_of(m.states.begin(), m.states.end(), [&](const HdState& s) {
    return (s.g1 > 0.0 && alpha > 0.0) || (s.h > 0.0 && alpha < 1.0);
  });
}

bool can_use_relay(const HdModel& m) {
  return std::any_of(m.states.begin(), m.states.end(),
                     [](const HdState& s) { return s.g2 > 0.0; });
}

// ---------------------------------------------------------------------------
// Scenario I

InnerResult scenario1_inner(const HdModel& m, double alpha, const SolverConfig& cfg) {
  const SourceFill src = source_fill(m, alpha, 2.0 * m.p, cfg);
  const RelayFill rel = relay_fill(m, 2.0 * m.q);
  return shared_theta_result(m, alpha, 0.5, src, rel, 1);
}

// ---------------------------------------------------------------------------
// Scenario II
//
// For a shared theta the source and relay problems decouple. The source level
// c fixes the densities s(c), hence theta = P / sum w s(c); the theta
// stationarity equation is solved in ln c.

InnerResult scenario2_inner(const HdModel& m, double alpha, const SolverConfig& cfg) {
  const std::size_t n = m.states.size();
  if (!(m.p > 0.0) || !can_use_source(m, alpha)) {
    SourceFill none;
    none.s.assign(n, 0.0);
    return shared_theta_result(m, alpha, 0.0, none, relay_fill(m, m.q), 1);
  }
  if (!(alpha > 0.0) || !(m.q > 0.0) || !can_use_relay(m)) {
    RelayFill none;
    none.u.assign(n, 0.0);
    return shared_theta_result(m, alpha, 1.0, source_fill(m, alpha, m.p, cfg), none, 1);
  }

  const double ln_c_max = std::log(source_fill(m, alpha, m.p, cfg).c);
  std::vector<double> s(n);
  int evaluations = 0;
  // Theta stationarity (nats) as a function of ln c; decreasing.
  auto eval = [&](double ln_c, RelayFill* rel_out) {
    ++evaluations;
    const double c = std::exp(ln_c);
    detail::CompensatedSum used, gain;
    for (std::size_t k = 0; k < n; ++k) {
      const HdState& st = m.states[k];
      s[k] = source_density(st, alpha, c);
      used.add(st.w * s[k]);
      gain.add(st.w * (alpha * phi(s[k] * st.g1) + (1.0 - alpha) * phi(s[k] * st.h)));
    }
    const double theta = std::min(1.0, m.p / used.value());
    if (!(theta < 1.0)) return std::pair{-kInf, theta};
    RelayFill rel = relay_fill(m, m.q / (1.0 - theta));
    detail::CompensatedSum loss;
    for (std::size_t k = 0; k < n; ++k) loss.add(m.states[k].w * alpha * phi(rel.u[k] * m.states[k].g2));
    if (rel_out != nullptr) *rel_out = std::move(rel);
    return std::pair{gain.value() - loss.value(), theta};
  };
  auto f = [&](double ln_c) { return eval(ln_c, nullptr).first; };

  double hi = ln_c_max;
  double f_hi = -kInf;
  double step = 1.0;
  double lo = hi - step;
  double f_lo = f(lo);
  // Walk down until the derivative is positive, tightening hi on the way.
  while (!(f_lo > 0.0)) {
    hi = lo;
    f_hi = f_lo;
    step *= 2.0;
    lo = ln_c_max - step;
    if (step > 2000.0) throw ConvergenceError("Scenario II: theta derivative never positive");
    f_lo = f(lo);
  }
  // Move hi off the theta = 1 boundary so f is finite there.
  if (!std::isfinite(f_hi)) {
    double delta = 0.5 * (hi - lo);
    while (true) {
      const double x = hi - delta;
      const double fx = f(x);
      if (fx > 0.0) {
        lo = x;
        f_lo = fx;
        delta *= 0.5;
        if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi))) {
          break;
        }
        continue;
      }
      hi = x;
      f_hi = fx;
      break;
    }
  }

  double root = lo;
  if (std::isfinite(f_hi)) {
    std::uintmax_t max_iter = 200;
    auto tol = [](double a, double b) {
      return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
    };
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
    root = std::abs(f(a)) <= std::abs(f(b)) ? a : b;
  }
  RelayFill rel;
  const auto [value, theta] = eval(root, &rel);
  (void)value;
  SourceFill src;
  src.s = s;
  src.c = std::exp(root);
  if (!(theta < 1.0)) {
    rel.u.assign(n, 0.0);
    rel.nu = kInf;
  }
  return shared_theta_result(m, alpha, theta, src, rel, evaluations);
}

// ---------------------------------------------------------------------------
// Scenario III
//
// With the duals fixed, every state is served by the source alone (theta = 1)
// or the relay alone (theta = 0), whichever earns more per unit resource;
// only tied states take an interior theta. The source level c is found by
// bracketing; for each c the relay level d follows from sorting the states by
// the relay level at which they switch modes.

struct Scenario3Point {
  Allocation alloc;
  double c = 0.0;
  double d = 0.0;
  double source_used = 0.0;
};

// Relay level at which the relay mode earns exactly `a` (nats per resource).
double switch_level(const HdState& s, double alpha, double a) {
  if (!(s.g2 > 0.0)) return 0.0;
  if (!(a > 0.0)) return alpha * s.g2;
  const double k = 1.0 + a / alpha;
  double arg = -std::exp(-k);
  arg = std::max(arg, -std::exp(-1.0));
  const double y = -boost::math::lambert_w0(arg);
  return alpha * s.g2 * std::clamp(y, 0.0, 1.0);
}

Scenario3Point scenario3_at(const HdModel& m, double alpha, double c) {
  const std::size_t n = m.states.size();
  std::vector<double> s(n), d_star(n);
  for (std::size_t k = 0; k < n; ++k) {
    const HdState& st = m.states[k];
    s[k] = source_density(st, alpha, c);
    d_star[k] = switch_level(st, alpha, source_value(st, alpha, c, s[k]));
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (d_star[k] > 0.0) order.push_back(k);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return d_star[i] > d_star[j]; });

  // Scan in decreasing relay level; the first `relay_count` states are relay
  // states, and `tie` (if any) is split with relay share `tie_share`.
  double d = 0.0;
  std::size_t relay_count = order.size();
  std::ptrdiff_t tie = -1;
  double tie_share = 0.0;
  double wsum = 0.0, vsum = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const HdState& st = m.states[order[j]];
    const double dj = d_star[order[j]];
    const double before = j == 0 ? 0.0 : alpha * wsum / dj - vsum;
    const double u_j = std::max(0.0, alpha / dj - 1.0 / st.g2);
    const double with = before + st.w * u_j;
    if (m.q <= with) {
      d = dj;
      relay_count = j;
      tie = static_cast<std::ptrdiff_t>(order[j]);
      tie_share = st.w * u_j > 0.0 ? std::clamp((m.q - before) / (st.w * u_j), 0.0, 1.0) : 0.0;
      break;
    }
    wsum += st.w;
    vsum += st.w / st.g2;
    const double next = j + 1 < order.size() ? d_star[order[j + 1]] : 0.0;
    const double level = alpha * wsum / (m.q + vsum);
    if (level >= next) {
      d = level;
      relay_count = j + 1;
      break;
    }
  }

  Scenario3Point out;
  out.c = c;
  out.d = d;
  Allocation& a = out.alloc;
  a.p.assign(n, 0.0);
  a.p_r.assign(n, 0.0);
  a.theta.assign(n, 1.0);
  std::vector<bool> relay(n, false);
  for (std::size_t j = 0; j < relay_count; ++j) relay[order[j]] = true;
  for (std::size_t k = 0; k < n; ++k) {
    const HdState& st = m.states[k];
    if (relay[k]) {
      a.theta[k] = 0.0;
      a.p_r[k] = relay_density(st, alpha, d);
    } else if (static_cast<std::ptrdiff_t>(k) == tie) {
      a.theta[k] = 1.0 - tie_share;
      a.p[k] = a.theta[k] * s[k];
      a.p_r[k] = tie_share * relay_density(st, alpha, d);
    } else if (s[k] > 0.0) {
      a.p[k] = s[k];
    } else {
      a.theta[k] = 0.0;
    }
  }
  out.source_used = weighted_sum(m, a.p);
  return out;
}

Allocation blend(const Allocation& x, const Allocation& y, double t) {
  auto mix = [t](const std::vector<double>& u, const std::vector<double>& v) {
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = (1.0 - t) * u[i] + t * v[i];
    return r;
  };
  return Allocation{mix(x.p, y.p), mix(x.p_r, y.p_r), mix(x.theta, y.theta)};
}

InnerResult scenario3_on_off(const HdModel& m, const SolverConfig& cfg) {
  const std::size_t n = m.states.size();
  const SourceFill src = source_fill(m, 0.0, m.p, cfg);
  std::vector<bool> idle(n);
  for (std::size_t k = 0; k < n; ++k) idle[k] = !(src.s[k] > 0.0);
  const RelayFill rel = relay_fill(m, m.q, &idle);
  Allocation a;
  a.p = src.s;
  a.p_r = rel.u;
  a.theta.resize(n);
  for (std::size_t k = 0; k < n; ++k) a.theta[k] = idle[k] ? 0.0 : 1.0;
  const double lambda = std::isfinite(src.c) ? src.c / kLn2 : 0.0;
  return finish(m, std::move(a), lambda, relay_multiplier(0.0, rel.nu), 1);
}

InnerResult scenario3_inner(const HdModel& m, double alpha, const SolverConfig& cfg) {
  const std::size_t n = m.states.size();
  if (!(alpha > 0.0)) return scenario3_on_off(m, cfg);
  if (!(m.p > 0.0) || !can_use_source(m, alpha)) {
    const RelayFill rel = relay_fill(m, m.q);
    Allocation a{std::vector<double>(n, 0.0), rel.u, std::vector<double>(n, 0.0)};
    return finish(m, std::move(a), 0.0, relay_multiplier(alpha, rel.nu), 1);
  }

  int evaluations = 0;
  auto excess = [&](double ln_c) {
    ++evaluations;
    return scenario3_at(m, alpha, std::exp(ln_c)).source_used - m.p;
  };
  double lo = std::log(1e-6), hi = std::log(1e6);
  double f_lo = excess(lo);
  while (!(f_lo > 0.0)) {
    hi = lo;
    lo -= 10.0;
    if (lo < -700.0) throw ConvergenceError("Scenario III: source budget unreachable");
    f_lo = excess(lo);
  }
  double f_hi = excess(hi);
  while (f_hi > 0.0) {
    lo = hi;
    f_lo = f_hi;
    hi += 10.0;
    if (hi > 700.0) throw ConvergenceError("Scenario III: source usage does not vanish");
    f_hi = excess(hi);
  }
  if (f_hi < 0.0) {
    // Usage jumps where states change mode; toms748 stalls on a jump, so it
    // gets a few steps and bisection finishes the bracket.
    auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(a)); };
    std::uintmax_t max_iter = 12;
    auto [a, b] = boost::math::tools::toms748_solve(excess, lo, hi, f_lo, f_hi, tol, max_iter);
    lo = a;
    hi = b;
    while (!tol(lo, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double f = excess(mid);
      if (f > 0.0) {
        lo = mid;
      } else if (f < 0.0) {
        hi = mid;
      } else {
        lo = hi = mid;
      }
    }
  } else {
    lo = hi;
  }
  // Both ends meet the relay budget exactly; blend them to meet the source
  // budget too.
  Scenario3Point x = scenario3_at(m, alpha, std::exp(lo));
  Scenario3Point y = scenario3_at(m, alpha, std::exp(hi));
  const double gap = x.source_used - y.source_used;
  double t = gap > 0.0 ? std::clamp((x.source_used - m.p) / gap, 0.0, 1.0) : 0.0;
  Allocation a = blend(x.alloc, y.alloc, t);
  const double lambda = ((1.0 - t) * x.c + t * y.c) / kLn2;
  const double mu = ((1.0 - t) * x.d + t * y.d) / kLn2;
  return finish(m, std::move(a), lambda, mu, evaluations);
}

InnerResult model_inner(const HdModel& m, double alpha, const SolverConfig& cfg) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("hd_inner: alpha outside [0,1]");
  switch (m.scenario) {
    case Scenario::kI:
      return scenario1_inner(m, alpha, cfg);
    case Scenario::kII:
      return scenario2_inner(m, alpha, cfg);
    case Scenario::kIII:
      return scenario3_inner(m, alpha, cfg);
  }
  throw InvariantError("unknown scenario");
}

void check_shape(const HdModel& m, const Allocation& a) {
  const std::size_t n = m.states.size();
  if (a.p.size() != n || a.p_r.size() != n || a.theta.size() != n) {
    throw DomainError(fmt::format("half-duplex allocation must have {} entries per field", n));
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double t = a.theta[k];
    if (!(t >= 0.0 && t <= 1.0)) {
      throw DomainError(fmt::format("theta[{}] = {} outside [0,1]", k, t));
    }
    if (m.scenario == Scenario::kI && std::abs(t - 0.5) > 1e-12) {
      throw DomainError("Scenario I requires theta = 1/2");
    }
    if (m.scenario == Scenario::kII && std::abs(t - a.theta[0]) > 1e-12) {
      throw DomainError("Scenario II requires one theta shared by all states");
    }
  }
}

MaxMinSolution optimize(const HalfDuplexProblem& problem, HalfDuplexBound bound, Scenario expect,
                        const SolverConfig& cfg) {
  if (problem.scenario != expect) {
    throw DomainError(fmt::format("solver for Scenario {} called on a Scenario {} problem",
                                  to_string(expect), to_string(problem.scenario)));
  }
  const HdModel m = build_model(problem, bound);
  MaxMinProblem mm;
  mm.description = fmt::format("half-duplex-{}{}", to_string(expect),
                               bound == HalfDuplexBound::kUpper ? "-upper" : "");
  mm.inner_maximize = [&](double alpha) { return model_inner(m, alpha, cfg); };
  mm.evaluate = [&](const Allocation& a) { return model_rates(m, a); };
  mm.zero_alpha_is_equalizer = expect == Scenario::kII;
  MaxMinSolution sol = solve_maxmin(mm, cfg);
  sol.capacity_certified = expect != Scenario::kI && bound == HalfDuplexBound::kLower &&
                           sol.case_tag == CaseTag::kCase2R1Binding;
  return sol;
}

}  // namespace

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::kI:
      return "I";
    case Scenario::kII:
      return "II";
    case Scenario::kIII:
      return "III";
  }
  return "?";
}

void HalfDuplexProblem::validate() const {
  auto ok = [](double b) { return std::isfinite(b) && b >= 0.0; };
  if (!ok(p_budget) || !ok(pr_budget)) {
    throw DomainError(fmt::format(
        "HalfDuplexProblem: budgets must be finite and >= 0 (P={}, P_R={})", p_budget, pr_budget));
  }
}

std::pair<double, double> hd_rate_terms(const HalfDuplexProblem& problem, const Allocation& alloc) {
  return hd_rate_terms(problem, HalfDuplexBound::kLower, alloc);
}

std::pair<double, double> hd_rate_terms(const HalfDuplexProblem& problem, HalfDuplexBound bound,
                                        const Allocation& alloc) {
  HalfDuplexProblem p = problem;
  if (bound == HalfDuplexBound::kUpper && p.scenario == Scenario::kI) p.scenario = Scenario::kII;
  const HdModel m = build_model(p, bound);
  HdModel shaped = m;
  shaped.scenario = problem.scenario;
  check_shape(shaped, alloc);
  return model_rates(m, alloc);
}

MaxMinSolution hd_scenario1_optimize(const HalfDuplexProblem& problem, const SolverConfig& cfg) {
  return optimize(problem, HalfDuplexBound::kLower, Scenario::kI, cfg);
}

MaxMinSolution hd_scenario2_optimize(const HalfDuplexProblem& problem, const SolverConfig& cfg) {
  return optimize(problem, HalfDuplexBound::kLower, Scenario::kII, cfg);
}

MaxMinSolution hd_scenario3_optimize(const HalfDuplexProblem& problem, const SolverConfig& cfg) {
  return optimize(problem, HalfDuplexBound::kLower, Scenario::kIII, cfg);
}

MaxMinSolution hd_scenario2_upper_bound(const HalfDuplexProblem& problem, const SolverConfig& cfg) {
  return optimize(problem, HalfDuplexBound::kUpper, Scenario::kII, cfg);
}

MaxMinSolution hd_scenario3_upper_bound(const HalfDuplexProblem& problem, const SolverConfig& cfg) {
  return optimize(problem, HalfDuplexBound::kUpper, Scenario::kIII, cfg);
}

MaxMinSolution hd_optimize(const HalfDuplexProblem& problem, HalfDuplexBound bound,
                           const SolverConfig& cfg) {
  return optimize(problem, bound, problem.scenario, cfg);
}

InnerResult hd_inner(const HalfDuplexProblem& problem, HalfDuplexBound bound, double alpha,
                     const SolverConfig& cfg) {
  cfg.validate();
  return model_inner(build_model(problem, bound), alpha, cfg);
}

std::optional<double> hd_certify_capacity(const HalfDuplexProblem& problem,
                                          const SolverConfig& cfg) {
  if (problem.scenario == Scenario::kI) {
    throw DomainError("hd_certify_capacity: Scenario I has no capacity certificate");
  }
  const InnerResult r = hd_inner(problem, HalfDuplexBound::kLower, 1.0, cfg);
  if (r.r1 > r.r2 + cfg.tol_rate) return std::nullopt;
  return r.r1;
}

double hd_theta_derivative(const HalfDuplexProblem& problem, HalfDuplexBound bound, double alpha,
                           const Allocation& alloc) {
  HalfDuplexProblem p = problem;
  if (bound == HalfDuplexBound::kUpper && p.scenario == Scenario::kI) p.scenario = Scenario::kII;
  const HdModel m = build_model(p, bound);
  if (alloc.theta.size() != m.states.size()) throw DomainError("hd_theta_derivative: bad theta");
  detail::CompensatedSum sum;
  for (std::size_t k = 0; k < m.states.size(); ++k) {
    const HdState& s = m.states[k];
    const double t = alloc.theta[k];
    const double src = t > 0.0 ? alloc.p[k] / t : (alloc.p[k] > 0.0 ? kInf : 0.0);
    const double rel = t < 1.0 ? alloc.p_r[k] / (1.0 - t) : (alloc.p_r[k] > 0.0 ? kInf : 0.0);
    sum.add(s.w * (alpha * phi(src * s.g1) + (1.0 - alpha) * phi(src * s.h) -
                   alpha * phi(rel * s.g2)));
  }
  return sum.value() / kLn2;
}

HalfDuplexKkt hd_kkt(const HalfDuplexProblem& problem, HalfDuplexBound bound,
                     const MaxMinSolution& sol) {
  const HdModel m = build_model(problem, bound);
  const Allocation& a = sol.allocation;
  check_shape(m, a);
  const double alpha = sol.alpha_star;
  const double lambda = sol.lambda;
  const double mu = sol.mu;
  const double relay_weight = alpha > 0.0 ? alpha : 1.0;
  HalfDuplexKkt out;
  auto worst = [](double& acc, double v) { acc = std::max(acc, v); };
  for (std::size_t k = 0; k < m.states.size(); ++k) {
    const HdState& s = m.states[k];
    const double t = a.theta[k];
    if (t > 0.0 && lambda > 0.0) {
      const double x = a.p[k] / t;
      const double grad = (alpha * s.g1 / (1.0 + x * s.g1) + (1.0 - alpha) * s.h / (1.0 + x * s.h)) / kLn2;
      const double d = grad / lambda - 1.0;
      worst(out.powers.stationarity, a.p[k] > 0.0 ? std::abs(d) : std::max(0.0, d));
    }
    if (t < 1.0 && mu > 0.0) {
      const double x = a.p_r[k] / (1.0 - t);
      const double grad = relay_weight * s.g2 / (kLn2 * (1.0 + x * s.g2));
      const double d = grad / mu - 1.0;
      worst(out.powers.stationarity, a.p_r[k] > 0.0 ? std::abs(d) : std::max(0.0, d));
    }
    if (m.scenario == Scenario::kIII && alpha > 0.0 && lambda > 0.0 && mu > 0.0) {
      const double c = lambda * kLn2, dd = mu * kLn2;
      const double src = source_value(s, alpha, c, source_density(s, alpha, c)) / kLn2;
      const double rel = relay_value(s, alpha, dd, relay_density(s, alpha, dd)) / kLn2;
      if (t >= 1.0) {
        worst(out.theta, rel - src);
      } else if (t <= 0.0) {
        if (a.p_r[k] > 0.0) worst(out.theta, src - rel);
      } else {
        worst(out.theta, std::abs(src - rel));
      }
    }
  }
  if (m.scenario == Scenario::kII && !a.theta.empty() && a.theta[0] > 0.0 && a.theta[0] < 1.0) {
    out.theta = std::abs(hd_theta_derivative(problem, bound, alpha, a));
  }
  // A zero multiplier marks a budget the solver declared slack.
  auto residual = [&](const std::vector<double>& x, double budget, double multiplier) {
    if (!(budget > 0.0) || !(multiplier > 0.0)) return 0.0;
    return std::abs(weighted_sum(m, x) - budget) / budget;
  };
  out.powers.budget = std::max(residual(a.p, m.p, lambda), residual(a.p_r, m.q, mu));
  return out;
}

}  // namespace relaycap
