#include "relaycap/parallel.hpp"

#include <cmath>

#include <fmt/format.h>

#include "summation.hpp"
#include "two_hop.hpp"

namespace relaycap {

namespace {

detail::TwoHopModel build_model(const ParallelProblem& problem) {
  problem.validate();
  detail::TwoHopModel m;
  m.rate_scale = 0.5;
  m.p_budget = problem.p_budget;
  m.q_budget = problem.pr_budget;
  m.states.reserve(problem.subchannels.size());
  for (const SubchannelSpec& s : problem.subchannels) {
    const double g1 = 1.0 / s.sigma_sq();
    const double h = s.in_a() ? 1.0 / s.sigma_r_sq() : g1;
    m.states.push_back({1.0, g1, s.rho_r() * g1, h});
  }
  return m;
}

void check_dims(const ParallelProblem& problem, std::size_t p, std::size_t q) {
  const std::size_t k = problem.subchannels.size();
  if (p != k || q != k) {
    throw DomainError(fmt::format("allocation has {}/{} entries for {} subchannels", p, q, k));
  }
}

}  // namespace

void ParallelProblem::validate() const {
  if (subchannels.empty()) throw DomainError("ParallelProblem: at least one subchannel required");
  auto ok = [](double b) { return std::isfinite(b) && b >= 0.0; };
  if (!ok(p_budget) || !ok(pr_budget)) {
    throw DomainError(
        fmt::format("ParallelProblem: budgets must be finite and >= 0 (P={}, P_R={})", p_budget,
                    pr_budget));
  }
}

double async_r1(const ParallelProblem& problem, const Allocation& alloc) {
  check_dims(problem, alloc.p.size(), alloc.p_r.size());
  return detail::two_hop_r1(build_model(problem), alloc.p, alloc.p_r);
}

double async_r2(const ParallelProblem& problem, const Allocation& alloc) {
  check_dims(problem, alloc.p.size(), alloc.p.size());
  return detail::two_hop_r2(build_model(problem), alloc.p);
}

MaxMinSolution async_optimize(const ParallelProblem& problem, const SolverConfig& cfg) {
  MaxMinSolution sol = detail::two_hop_optimize(build_model(problem), cfg, "parallel-async");
  sol.capacity_certified = true;
  return sol;
}

InnerResult iterative_waterfill_alpha(const ParallelProblem& problem, double alpha,
                                      const SolverConfig& cfg) {
  return detail::two_hop_inner(build_model(problem), alpha, cfg);
}

KktResiduals async_kkt(const ParallelProblem& problem, const MaxMinSolution& sol) {
  return detail::two_hop_kkt(build_model(problem), sol.alpha_star, sol.allocation, sol.lambda,
                             sol.mu);
}

double sync_r1(const ParallelProblem& problem, const SyncAllocation& alloc) {
  problem.validate();
  check_dims(problem, alloc.p.size(), alloc.p_r.size());
  check_dims(problem, alloc.beta.size(), alloc.beta.size());
  detail::CompensatedSum sum;
  for (std::size_t k = 0; k < problem.subchannels.size(); ++k) {
    const SubchannelSpec& s = problem.subchannels[k];
    const double beta = alloc.beta[k];
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("sync_r1: beta outside [0,1]");
    const double p = alloc.p[k], q = alloc.p_r[k];
    const double coherent = 2.0 * std::sqrt((1.0 - beta) * s.rho_r() * p * q);
    sum.add(cap_real((p + s.rho_r() * q + coherent) / s.sigma_sq()));
  }
  return sum.value();
}

double sync_r2(const ParallelProblem& problem, const SyncAllocation& alloc) {
  problem.validate();
  check_dims(problem, alloc.p.size(), alloc.beta.size());
  detail::CompensatedSum sum;
  for (std::size_t k = 0; k < problem.subchannels.size(); ++k) {
    const SubchannelSpec& s = problem.subchannels[k];
    const double beta = alloc.beta[k];
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("sync_r2: beta outside [0,1]");
    const double noise = s.in_a() ? s.sigma_r_sq() : s.sigma_sq();
    sum.add(cap_real(beta * alloc.p[k] / noise));
  }
  return sum.value();
}

std::optional<MaxMinSolution> sync_case1_optimize(const ParallelProblem& problem,
                                                  const SolverConfig& cfg) {
  cfg.validate();
  const detail::TwoHopModel m = build_model(problem);
  InnerResult r = detail::two_hop_inner(m, 0.0, cfg);
  if (r.r1 < r.r2 - cfg.tol_rate) return std::nullopt;
  MaxMinSolution sol;
  sol.case_tag = CaseTag::kCase1R2Binding;
  sol.alpha_star = 0.0;
  sol.r1_bits = r.r1;
  sol.r2_bits = r.r2;
  sol.rate_bits = std::min(r.r1, r.r2);
  sol.allocation = std::move(r.allocation);
  sol.lambda = r.lambda;
  sol.mu = r.mu;
  sol.iterations = 1;
  sol.capacity_certified = true;
  sol.probes.push_back({0.0, sol.r1_bits, sol.r2_bits});
  return sol;
}

}  // namespace relaycap
