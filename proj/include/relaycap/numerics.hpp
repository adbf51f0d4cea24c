// Numeric kernels the relay solvers are assembled from: budget-constrained
// water-filling, the two-term harmonic stationarity root, scalar bracketing,
// orthogonal-division water-filling and the max-min engine that searches the
// mixing weight alpha.
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relaycap/core_types.hpp"

namespace relaycap {

struct WaterfillResult {
  std::vector<double> allocation;
  double water_level = 0.0;  // nu
  double multiplier = 0.0;   // 1 / (nu ln 2)
};

/// Maximizes sum_k w_k log(1 + x_k / (s_k n_k)) style objectives: returns
/// x_k = s_k (nu - n_k)^+ with sum_k w_k x_k = budget.
///
/// Noise levels may be +infinity (the entry never receives power). When every
/// level is infinite the budget cannot be spent and the allocation is zero.
WaterfillResult waterfill(std::span<const double> noise_levels, std::span<const double> weights,
                          std::span<const double> scales, double budget);

/// Positive root of alpha/(x+a) + (1-alpha)/(x+b) = c, or nullopt when the
/// left side at x = 0 does not exceed c.
std::optional<double> harmonic_root(double alpha, double a, double b, double c);

/// Midpoint bisection on a bracket with a sign change.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Finds c > 0 with usage(c) = budget for a usage curve that is continuous and
/// non-increasing in c, tends to +inf as c -> 0 and to 0 as c -> inf.
/// Returns +inf when usage is identically zero (budget cannot be spent).
double solve_budget_multiplier(const std::function<double(double)>& usage, double budget,
                               double tol_budget);

struct OrthogonalDivision {
  std::vector<double> p;
  std::vector<double> p_r;
  // Water levels of the source and relay fills; 1/nu is the marginal value of
  // ln(1 + a p + b p_r) per unit power.
  double nu_source = 0.0;
  double nu_relay = 0.0;
};

/// Maximizes sum_k w_k ln(1 + a_k p_k + b_k q_k) subject to sum w p = p_budget
/// and sum w q = q_budget. Each state is funded by whichever node is cheaper
/// (lambda/a_k vs mu/b_k); a state exactly on the boundary is split, source
/// first, so that both budgets are met.
OrthogonalDivision orthogonal_division(std::span<const double> weights, std::span<const double> a,
                                       std::span<const double> b, double p_budget,
                                       double q_budget);

/// Worst relative KKT violations of a returned allocation.
struct KktResiduals {
  double stationarity = 0.0;  // stationarity / complementary slackness
  double budget = 0.0;        // |sum w x - budget| / budget
};

// ---------------------------------------------------------------------------
// Max-min engine

/// Result of maximizing alpha R1 + (1 - alpha) R2 for one alpha.
struct InnerResult {
  Allocation allocation;
  double r1 = 0.0;
  double r2 = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  int iterations = 0;
  double worst_half_step_delta = 0.0;
};

struct MaxMinProblem {
  std::function<InnerResult(double alpha)> inner_maximize;
  std::string description;
  /// Optional: rate pair of an arbitrary feasible allocation. When present and
  /// the alpha bisection collapses onto a jump of r1 - r2, the engine blends the
  /// two bracketing maximizers to reach the equalizer.
  std::function<std::pair<double, double>(const Allocation&)> evaluate;
  /// Report an alpha = 0 solution with r1 ~ r2 as Case 3 instead of Case 1.
  bool zero_alpha_is_equalizer = false;
};

MaxMinSolution solve_maxmin(const MaxMinProblem& problem, const SolverConfig& cfg);

}  // namespace relaycap
