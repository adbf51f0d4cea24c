// Fading half-duplex relay channel over orthogonal channels. The source uses
// a fraction theta of the channel resource and the relay the rest:
//
//   Scenario I    theta = 1/2 fixed
//   Scenario II   one theta shared by every fading state
//   Scenario III  theta(h) chosen per state
//
// Rates use the time-shared form t log2(1 + x/t), continuously extended by 0
// at t = 0.
#pragma once

#include <optional>
#include <utility>

#include "relaycap/core_types.hpp"
#include "relaycap/numerics.hpp"

namespace relaycap {

enum class Scenario { kI, kII, kIII };

std::string_view to_string(Scenario s);

struct HalfDuplexProblem {
  StateEnsemble ensemble;
  double p_budget = 0.0;
  double pr_budget = 0.0;
  Scenario scenario = Scenario::kI;

  void validate() const;
};

enum class HalfDuplexBound { kLower, kUpper };

/// (r1, r2) of the achievable-rate expression. `alloc.theta` must have one
/// entry per state and respect the scenario's shape.
std::pair<double, double> hd_rate_terms(const HalfDuplexProblem& problem, const Allocation& alloc);
/// Same with the cut-set second term E[theta log2(1 + P (g1 + g3)/theta)]
/// when `bound` is kUpper.
std::pair<double, double> hd_rate_terms(const HalfDuplexProblem& problem, HalfDuplexBound bound,
                                        const Allocation& alloc);

/// Scenario I, II and III lower bounds. The problem's scenario must match.
/// Scenario II and III solutions in the R1-binding case are flagged
/// capacity_certified.
MaxMinSolution hd_scenario1_optimize(const HalfDuplexProblem& problem, const SolverConfig& cfg);
MaxMinSolution hd_scenario2_optimize(const HalfDuplexProblem& problem, const SolverConfig& cfg);
MaxMinSolution hd_scenario3_optimize(const HalfDuplexProblem& problem, const SolverConfig& cfg);
MaxMinSolution hd_scenario2_upper_bound(const HalfDuplexProblem& problem, const SolverConfig& cfg);
MaxMinSolution hd_scenario3_upper_bound(const HalfDuplexProblem& problem, const SolverConfig& cfg);

/// Dispatches on problem.scenario.
MaxMinSolution hd_optimize(const HalfDuplexProblem& problem, HalfDuplexBound bound,
                           const SolverConfig& cfg);

/// Maximizer of alpha r1 + (1 - alpha) r2 for the problem's scenario.
InnerResult hd_inner(const HalfDuplexProblem& problem, HalfDuplexBound bound, double alpha,
                     const SolverConfig& cfg);

/// Scenarios II and III: the capacity when the R1-binding policy leaves
/// r2 >= r1, else nullopt.
std::optional<double> hd_certify_capacity(const HalfDuplexProblem& problem,
                                          const SolverConfig& cfg);

/// d/dtheta of alpha r1 + (1 - alpha) r2 at a shared theta, in bits.
double hd_theta_derivative(const HalfDuplexProblem& problem, HalfDuplexBound bound, double alpha,
                           const Allocation& alloc);

struct HalfDuplexKkt {
  KktResiduals powers;
  // Scenario II: |d/dtheta| at an interior theta (bits). Scenario III: worst
  // violation of the per-state source/relay mode choice (bits).
  double theta = 0.0;
};

HalfDuplexKkt hd_kkt(const HalfDuplexProblem& problem, HalfDuplexBound bound,
                     const MaxMinSolution& sol);

}  // namespace relaycap
