#include "relaycap/full_duplex.hpp"

#include <cmath>

#include <fmt/format.h>

#include "two_hop.hpp"

namespace relaycap {

namespace {

detail::TwoHopModel build_model(const FullDuplexProblem& problem, FullDuplexBound bound) {
  problem.validate();
  detail::TwoHopModel m;
  m.rate_scale = 1.0;
  m.p_budget = problem.p_budget;
  m.q_budget = problem.pr_budget;
  m.states.reserve(problem.ensemble.size());
  for (const FadingState& s : problem.ensemble.states()) {
    double h = s.g1 + s.g3;
    if (bound == FullDuplexBound::kLower) h = s.in_a() ? s.g3 : s.g1;
    m.states.push_back({s.weight, s.g1, s.g2, h});
  }
  return m;
}

}  // namespace

void FullDuplexProblem::validate() const {
  auto ok = [](double b) { return std::isfinite(b) && b >= 0.0; };
  if (!ok(p_budget) || !ok(pr_budget)) {
    throw DomainError(fmt::format(
        "FullDuplexProblem: budgets must be finite and >= 0 (P={}, P_R={})", p_budget, pr_budget));
  }
}

double fd_r1(const FullDuplexProblem& problem, const Allocation& alloc) {
  return detail::two_hop_r1(build_model(problem, FullDuplexBound::kLower), alloc.p, alloc.p_r);
}

double fd_r2(const FullDuplexProblem& problem, FullDuplexBound bound, const Allocation& alloc) {
  return detail::two_hop_r2(build_model(problem, bound), alloc.p);
}

MaxMinSolution fd_lower_bound(const FullDuplexProblem& problem, const SolverConfig& cfg) {
  MaxMinSolution sol =
      detail::two_hop_optimize(build_model(problem, FullDuplexBound::kLower), cfg, "fd-lower");
  sol.capacity_certified = sol.case_tag == CaseTag::kCase2R1Binding;
  return sol;
}

MaxMinSolution fd_upper_bound(const FullDuplexProblem& problem, const SolverConfig& cfg) {
  return detail::two_hop_optimize(build_model(problem, FullDuplexBound::kUpper), cfg, "fd-upper");
}

std::optional<double> fd_certify_capacity(const FullDuplexProblem& problem,
                                          const SolverConfig& cfg) {
  cfg.validate();
  const InnerResult r =
      detail::two_hop_inner(build_model(problem, FullDuplexBound::kLower), 1.0, cfg);
  if (r.r1 > r.r2 + cfg.tol_rate) return std::nullopt;
  return r.r1;
}

KktResiduals fd_kkt(const FullDuplexProblem& problem, FullDuplexBound bound,
                    const MaxMinSolution& sol) {
  return detail::two_hop_kkt(build_model(problem, bound), sol.alpha_star, sol.allocation,
                             sol.lambda, sol.mu);
}

}  // namespace relaycap
