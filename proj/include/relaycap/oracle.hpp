// Brute-force grid oracles for small instances. They share nothing with the
// solvers beyond the rate kernels and report a certified error bar: the true
// optimum lies in [value, value + gap].
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "relaycap/core_types.hpp"
#include "relaycap/parallel.hpp"

namespace relaycap {

enum class FadingModel {
  kFullDuplexLower,
  kFullDuplexUpper,
  kScenarioI,
  kScenarioII,
  kScenarioIII,
  kScenarioIIUpper,
  kScenarioIIIUpper,
};

std::string_view to_string(FadingModel m);

struct OracleResult {
  double value = 0.0;
  Allocation allocation;
  std::vector<double> beta;  // grid_sync_parallel only
  double gap = 0.0;
  std::uint64_t evaluations = 0;
};

/// Enumerates source and relay budget splits with step `resolution` (a
/// fraction of the budget). K <= 3.
OracleResult grid_maxmin_parallel(const ParallelProblem& problem, double resolution);

/// Per-state power splits plus a theta grid for Scenarios II/III (step
/// `theta_resolution`, 0 meaning `resolution`; endpoints 0 and 1 included).
/// At most 3 states, 2 for Scenario III.
OracleResult grid_maxmin_fading(const StateEnsemble& ensemble, double p_budget, double pr_budget,
                                FadingModel model, double resolution,
                                double theta_resolution = 0.0);

/// Synchronized parallel channel: power splits and a beta grid per
/// subchannel. K <= 2.
OracleResult grid_sync_parallel(const ParallelProblem& problem, double resolution);

}  // namespace relaycap
