// Gaussian parallel relay channel with degraded subchannels.
//
// The asynchronized model has no source/relay coherence; its max-min problem
// is solved exactly. The synchronized model adds a correlation parameter
// beta_k per subchannel; only its R2-binding case has a closed form.
#pragma once

#include <optional>
#include <vector>

#include "relaycap/core_types.hpp"
#include "relaycap/numerics.hpp"

namespace relaycap {

struct ParallelProblem {
  std::vector<SubchannelSpec> subchannels;
  double p_budget = 0.0;
  double pr_budget = 0.0;

  void validate() const;
};

struct SyncAllocation {
  std::vector<double> p;
  std::vector<double> p_r;
  std::vector<double> beta;
};

/// sum_k C((P_k + rho_k P_Rk) / sigma_k^2).
double async_r1(const ParallelProblem& problem, const Allocation& alloc);
/// sum_A C(P_k / sigma_Rk^2) + sum_Ac C(P_k / sigma_k^2).
double async_r2(const ParallelProblem& problem, const Allocation& alloc);

/// Max-min optimal powers. Always capacity_certified: for this model the
/// max-min value is the capacity.
MaxMinSolution async_optimize(const ParallelProblem& problem, const SolverConfig& cfg);

/// Maximizer of alpha R1 + (1 - alpha) R2 (iterative water-filling for
/// 0 < alpha < 1).
InnerResult iterative_waterfill_alpha(const ParallelProblem& problem, double alpha,
                                      const SolverConfig& cfg);

/// Residuals of a solution returned by async_optimize against the KKT system
/// of its alpha_star.
KktResiduals async_kkt(const ParallelProblem& problem, const MaxMinSolution& sol);

double sync_r1(const ParallelProblem& problem, const SyncAllocation& alloc);
double sync_r2(const ParallelProblem& problem, const SyncAllocation& alloc);

/// The synchronized R2-binding case: two-level water-filling with beta = 1.
/// Returns nullopt when R1 >= R2 fails at that allocation, in which case the
/// optimum is in the nonconvex equalizer regime (see grid_sync_parallel).
/// The returned allocation implies beta_k = 1 on every subchannel.
std::optional<MaxMinSolution> sync_case1_optimize(const ParallelProblem& problem,
                                                  const SolverConfig& cfg);

}  // namespace relaycap
