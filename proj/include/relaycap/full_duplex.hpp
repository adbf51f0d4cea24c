// Fading full-duplex relay channel: decode-and-forward lower bound, cut-set
// upper bound and the orthogonal-division capacity certificate.
#pragma once

#include <optional>

#include "relaycap/core_types.hpp"
#include "relaycap/numerics.hpp"

namespace relaycap {

struct FullDuplexProblem {
  StateEnsemble ensemble;
  double p_budget = 0.0;
  double pr_budget = 0.0;

  void validate() const;
};

enum class FullDuplexBound { kLower, kUpper };

/// E[log2(1 + P g1 + P_R g2)].
double fd_r1(const FullDuplexProblem& problem, const Allocation& alloc);
/// Lower: E_A[log2(1 + P g3)] + E_Ac[log2(1 + P g1)]. Upper: E[log2(1 + P (g1 + g3))].
double fd_r2(const FullDuplexProblem& problem, FullDuplexBound bound, const Allocation& alloc);

/// Flags capacity_certified when the solution is R1-binding (orthogonal
/// division is then capacity achieving).
MaxMinSolution fd_lower_bound(const FullDuplexProblem& problem, const SolverConfig& cfg);
MaxMinSolution fd_upper_bound(const FullDuplexProblem& problem, const SolverConfig& cfg);

/// Capacity when the orthogonal-division policy leaves R2 >= R1, else nullopt.
std::optional<double> fd_certify_capacity(const FullDuplexProblem& problem,
                                          const SolverConfig& cfg);

KktResiduals fd_kkt(const FullDuplexProblem& problem, FullDuplexBound bound,
                    const MaxMinSolution& sol);

}  // namespace relaycap
