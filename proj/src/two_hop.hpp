// Shared engine for the decode-and-forward max-min problems whose two rate
// terms are
//
//   R1 = kappa sum_k w_k log2(1 + g1_k p_k + g2_k q_k)   (multiple access)
//   R2 = kappa sum_k w_k log2(1 + h_k p_k)               (relay decoding)
//
// The asynchronized parallel relay channel (w = 1, kappa = 1/2, sums) and the
// full-duplex fading bounds (probability weights, kappa = 1) are both
// instances.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "relaycap/core_types.hpp"
#include "relaycap/numerics.hpp"

namespace relaycap::detail {

struct LinkState {
  double w = 1.0;
  double g1 = 0.0;  // source -> destination
  double g2 = 0.0;  // relay -> destination
  double h = 0.0;   // gain seen by the R2 term
};

struct TwoHopModel {
  std::vector<LinkState> states;
  double rate_scale = 1.0;  // kappa
  double p_budget = 0.0;
  double q_budget = 0.0;
};

double two_hop_r1(const TwoHopModel& m, std::span<const double> p, std::span<const double> q);
double two_hop_r2(const TwoHopModel& m, std::span<const double> p);

/// Maximizes alpha R1 + (1 - alpha) R2. alpha = 0 gives two-level
/// water-filling (relay power spent on R1 as a tie-break), alpha = 1 gives
/// orthogonal division, anything in between runs iterative water-filling.
InnerResult two_hop_inner(const TwoHopModel& m, double alpha, const SolverConfig& cfg);

MaxMinSolution two_hop_optimize(const TwoHopModel& m, const SolverConfig& cfg,
                                const std::string& description);

using KktReport = KktResiduals;

/// Residuals of the KKT system for the alpha-weighted objective at `alloc`.
/// At alpha = 0 the relay half is checked against R1, the tie-break it was
/// chosen by.
KktReport two_hop_kkt(const TwoHopModel& m, double alpha, const Allocation& alloc, double lambda,
                      double mu);

}  // namespace relaycap::detail
